#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "qpgen/scenarios.hpp"

namespace qpgen::cli {

inline constexpr const char* kRateHeader =
    "grid_index,omega_d_GHz,amplitude,alpha,beta,n,junction,omega_GHz,gamma_per_s,T_s,xqp_star,flags";

/// %.17g, with "inf", "-inf" and "nan" spelled out.
std::string fmt(double x);

/// Rows for one point: per state an aggregate row (beta, n, junction and
/// omega_GHz are "*") followed by its channels. Skipped points give one row
/// with alpha "*".
std::vector<std::string> rate_rows(const scenarios::PointResult& r, const rates::QpEnvironment& env);

/// Writes to `<path>.partial` and renames onto `path` on commit(). The partial
/// file is left behind when the writer is destroyed uncommitted.
class AtomicFile {
 public:
  explicit AtomicFile(std::string path);
  ~AtomicFile();
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  void line(const std::string& s);
  void write(const std::string& s);
  void flush();
  void commit();
  const std::string& partial_path() const { return partial_; }

 private:
  std::string path_;
  std::string partial_;
  std::FILE* f_ = nullptr;
};

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Quick-look line plot. Non-finite or (with log_y) nonpositive samples break
/// the line.
std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<Series>& series, bool log_y);

}  // namespace qpgen::cli
