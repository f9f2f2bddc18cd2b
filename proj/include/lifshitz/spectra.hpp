#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace lifshitz::spectra {

// Complex permittivity on the real frequency axis, split into parts.
struct Permittivity {
  double re = 0.0;
  double im = 0.0;
};

struct SpectralPoint {
  double omega = 0.0;  // photon energy, eV
  std::optional<double> eps_re;
  std::optional<double> eps_im;
};

// Free-text provenance. `accuracy` is informational only and never used as a fit weight.
struct TableMeta {
  std::string source;
  std::string sample;
  std::string accuracy;
  std::vector<std::string> notes;
};

enum class TableFormat { eps, nk };
enum class Field { eps_re, eps_im };

// Validated optical table: omega strictly ascending, at least four points,
// every point carries at least one part and eps_im >= 0 when present.
class SpectralTable {
 public:
  static constexpr std::size_t kMinPoints = 4;

  explicit SpectralTable(std::vector<SpectralPoint> points, TableMeta meta = {});

  const std::vector<SpectralPoint>& points() const noexcept { return points_; }
  const TableMeta& meta() const noexcept { return meta_; }
  std::size_t size() const noexcept { return points_.size(); }
  double omega_min() const { return points_.front().omega; }
  double omega_max() const { return points_.back().omega; }

  // Points carrying `field`, optionally restricted to [lo, hi].
  std::vector<SpectralPoint> with_field(Field field, double lo = 0.0,
                                        double hi = std::numeric_limits<double>::infinity()) const;

 private:
  std::vector<SpectralPoint> points_;
  TableMeta meta_;
};

// (n + ik)^2 split into real and imaginary parts. n, k >= 0.
Permittivity eps_from_nk(double n, double k);

// Inverse of eps_from_nk on the principal branch (n >= 0).
std::array<double, 2> nk_from_eps(double eps_re, double eps_im);

SpectralTable parse_table(std::istream& in, TableFormat format, const std::string& source = {});
SpectralTable load_table(const std::filesystem::path& path, TableFormat format);

// CSV writer (eps layout, 15 significant digits, meta as '#' comments).
void write_table(std::ostream& out, const SpectralTable& table);
void save_table(const std::filesystem::path& path, const SpectralTable& table);

// Points of `low` at or below omega_joint followed by points of `high` above it.
SpectralTable merge_tables(const SpectralTable& low, const SpectralTable& high, double omega_joint);

// ---------------------------------------------------------------------------
// Segmented quartic smoothing

enum class Basis { powers, inverse_powers };

struct Segment {
  double omega_lo = 0.0;  // first and last abscissa of the points fitted
  double omega_hi = 0.0;
  Basis basis = Basis::powers;
  // Polynomial in t = (v - center) / scale, v = omega or 1/omega.
  double center = 0.0;
  double scale = 1.0;
  std::array<double, 5> coeffs{};

  double value(double omega) const;
  double derivative(double omega) const;
};

struct SmoothingOptions {
  std::size_t seg_len = 12;
  std::size_t overlap = 4;
  Basis first_basis = Basis::inverse_powers;
};

// Piecewise quartic least-squares fit. Inside each overlap the neighbouring
// quartics are blended with the smoothstep weight 3t^2 - 2t^3, which makes the
// curve C1 across every join.
class SmoothedCurve {
 public:
  static constexpr int kDegree = 4;

  explicit SmoothedCurve(std::vector<Segment> segments);

  double evaluate(double omega) const;
  double derivative(double omega) const;
  double operator()(double omega) const { return evaluate(omega); }

  double omega_min() const { return segments_.front().omega_lo; }
  double omega_max() const { return segments_.back().omega_hi; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }

  // Abscissae where the curve switches between a pure segment and a blend.
  std::vector<double> joins() const;
  // omega_min, joins..., omega_max: the curve is smooth between consecutive entries.
  std::vector<double> breakpoints() const;

 private:
  std::vector<Segment> segments_;
};

SmoothedCurve smooth_segments(const SpectralTable& table, Field field,
                              const SmoothingOptions& options = {});

}  // namespace lifshitz::spectra
