#include "output.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <limits>

#include "qpgen/errors.hpp"

namespace qpgen::cli {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string join_flags(const std::vector<std::string>& a, const std::vector<std::string>& b,
                       bool ambiguous) {
  std::vector<std::string> all;
  for (const auto* v : {&a, &b})
    for (const auto& f : *v)
      if (std::find(all.begin(), all.end(), f) == all.end()) all.push_back(f);
  if (ambiguous && std::find(all.begin(), all.end(), "ambiguous") == all.end())
    all.push_back("ambiguous");
  std::string s;
  for (const auto& f : all) {
    if (!s.empty()) s += ';';
    s += f;
  }
  return s;
}

}  // namespace

std::vector<std::string> rate_rows(const scenarios::PointResult& r, const rates::QpEnvironment& env) {
  std::vector<std::string> out;
  const std::string head = std::to_string(r.grid_index) + "," + fmt(r.omega_d) + "," + fmt(r.amplitude) + ",";
  if (r.skipped || r.states.empty()) {
    std::vector<std::string> flags = r.flags;
    if (r.skipped && std::find(flags.begin(), flags.end(), "skipped") == flags.end())
      flags.insert(flags.begin(), "skipped");
    out.push_back(head + "*,*,*,*,*,nan,nan,nan," + join_flags(flags, {}, false));
    return out;
  }
  for (const auto& s : r.states) {
    const std::string a = std::to_string(s.alpha) + ",";
    const double g = s.present ? s.summary.gamma : std::numeric_limits<double>::quiet_NaN();
    const double t = s.present ? s.summary.lifetime : std::numeric_limits<double>::quiet_NaN();
    const double x = s.present ? s.xqp : std::numeric_limits<double>::quiet_NaN();
    out.push_back(head + a + "*,*,*,*," + fmt(g) + "," + fmt(t) + "," + fmt(x) + "," +
                  join_flags(r.flags, s.flags, false));
    for (const auto& c : s.channels.channels) {
      const double tc = c.gamma > 0.0 ? 1.0 / c.gamma : std::numeric_limits<double>::infinity();
      const double xc = rates::steady_state_xqp(c.gamma, env.n_cp, env.c_r);
      out.push_back(head + a + std::to_string(c.beta) + "," + std::to_string(c.n) + "," +
                    std::to_string(c.junction) + "," + fmt(c.omega) + "," + fmt(c.gamma) + "," +
                    fmt(tc) + "," + fmt(xc) + "," + join_flags({}, {}, c.ambiguous));
    }
  }
  return out;
}

AtomicFile::AtomicFile(std::string path) : path_(std::move(path)), partial_(path_ + ".partial") {
  f_ = std::fopen(partial_.c_str(), "wb");
  if (!f_) throw ArgumentError("cannot open '" + partial_ + "': " + std::strerror(errno));
}

AtomicFile::~AtomicFile() {
  if (f_) std::fclose(f_);
}

void AtomicFile::write(const std::string& s) {
  if (!f_) throw ArgumentError("write after commit: " + path_);
  if (std::fwrite(s.data(), 1, s.size(), f_) != s.size())
    throw ResourceError("write failed: " + partial_);
}

void AtomicFile::line(const std::string& s) {
  write(s);
  write("\n");
}

void AtomicFile::flush() {
  if (f_) std::fflush(f_);
}

void AtomicFile::commit() {
  if (!f_) return;
  const bool ok = std::fclose(f_) == 0;
  f_ = nullptr;
  if (!ok || std::rename(partial_.c_str(), path_.c_str()) != 0)
    throw ResourceError("cannot finalize '" + path_ + "'");
}

std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<Series>& series, bool log_y) {
  const double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_y || y > 0.0);
  };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  char buf[256];
  std::string s;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                "font-family=\"sans-serif\" font-size=\"12\">\n",
                W, H);
  s += buf;
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  s += buf;
  s += "<text x=\"" + fmt(L) + "\" y=\"24\">" + title + "</text>\n";
  s += "<text x=\"" + fmt((W - R + L) / 2) + "\" y=\"" + fmt(H - 12) + "\" text-anchor=\"middle\">" +
       xlabel + "</text>\n";
  s += "<text transform=\"translate(16," + fmt((H - B + T) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       ylabel + (log_y ? " (log10)" : "") + "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.4g</text>\n",
                  L + (W - L - R) * k / 4, H - B + 16, xv);
    s += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.4g</text>\n",
                  L - 4, H - B - (H - T - B) * k / 4 + 4, yv);
    s += buf;
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& sr = series[k];
    const char* c = colors[k % 6];
    std::string pts;
    auto flush = [&] {
      if (!pts.empty())
        s += std::string("<polyline fill=\"none\" stroke=\"") + c + "\" stroke-width=\"1.5\" points=\"" +
             pts + "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < sr.x.size() && i < sr.y.size(); ++i) {
      if (!usable(sr.x[i], sr.y[i])) {
        flush();
        continue;
      }
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(sr.x[i]), py(sr.y[i]));
      pts += buf;
    }
    flush();
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" fill=\"%s\">%s</text>\n", W - R + 10,
                  T + 16.0 * (k + 1), c, sr.name.c_str());
    s += buf;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace qpgen::cli
