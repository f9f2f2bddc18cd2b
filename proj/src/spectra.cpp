#include "lifshitz/spectra.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <span>
#include <sstream>

#include <Eigen/Dense>

#include "lifshitz/errors.hpp"

namespace lifshitz::spectra {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_number(const std::string& text, std::size_t line, bool allow_empty) {
  if (text.empty()) {
    if (allow_empty) return std::nullopt;
    throw ParseError("missing value", line);
  }
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (errno != 0 || end == text.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw ParseError("not a number: '" + text + "'", line);
  }
  return v;
}

void validate_point(const SpectralPoint& p, std::size_t index) {
  const std::string where = "point " + std::to_string(index) + " (omega=" + std::to_string(p.omega) + ")";
  if (!(p.omega > 0.0) || !std::isfinite(p.omega)) {
    throw ValidationError(where + ": omega must be positive");
  }
  if (!p.eps_re && !p.eps_im) throw ValidationError(where + ": no permittivity value");
  if (p.eps_im && *p.eps_im < 0.0) throw ValidationError(where + ": eps_im < 0 violates passivity");
}

// Smoothstep weight and its derivative with respect to t.
double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }
double smoothstep_dt(double t) { return 6.0 * t * (1.0 - t); }

Segment fit_segment(std::span<const double> omega, std::span<const double> value, Basis basis) {
  std::vector<double> distinct(omega.begin(), omega.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 5) {
    throw ValidationError("rank-deficient segment: fewer than 5 distinct frequencies");
  }

  Segment seg;
  seg.omega_lo = omega.front();
  seg.omega_hi = omega.back();
  seg.basis = basis;
  auto var = [basis](double w) { return basis == Basis::powers ? w : 1.0 / w; };
  const double v0 = var(seg.omega_lo);
  const double v1 = var(seg.omega_hi);
  seg.center = 0.5 * (v0 + v1);
  seg.scale = 0.5 * std::abs(v1 - v0);

  const auto n = static_cast<Eigen::Index>(omega.size());
  Eigen::MatrixXd a(n, 5);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (var(omega[i]) - seg.center) / seg.scale;
    double tp = 1.0;
    for (int j = 0; j < 5; ++j) {
      a(i, j) = tp;
      tp *= t;
    }
    b(i) = value[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 5) throw ValidationError("rank-deficient segment design matrix");
  const Eigen::VectorXd c = qr.solve(b);
  for (int j = 0; j < 5; ++j) seg.coeffs[j] = c(j);
  return seg;
}

}  // namespace

// ---------------------------------------------------------------------------

SpectralTable::SpectralTable(std::vector<SpectralPoint> points, TableMeta meta)
    : points_(std::move(points)), meta_(std::move(meta)) {
  if (points_.size() < kMinPoints) {
    throw ValidationError("spectral table needs at least " + std::to_string(kMinPoints) +
                          " points, got " + std::to_string(points_.size()));
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    validate_point(points_[i], i);
    if (i > 0 && !(points_[i].omega > points_[i - 1].omega)) {
      throw ValidationError("omega not strictly ascending at point " + std::to_string(i));
    }
  }
}

std::vector<SpectralPoint> SpectralTable::with_field(Field field, double lo, double hi) const {
  std::vector<SpectralPoint> out;
  for (const auto& p : points_) {
    const bool has = field == Field::eps_re ? p.eps_re.has_value() : p.eps_im.has_value();
    if (has && p.omega >= lo && p.omega <= hi) out.push_back(p);
  }
  return out;
}

Permittivity eps_from_nk(double n, double k) {
  if (!(n >= 0.0) || !(k >= 0.0)) throw DomainError("eps_from_nk: n and k must be non-negative");
  return {n * n - k * k, 2.0 * n * k};
}

std::array<double, 2> nk_from_eps(double eps_re, double eps_im) {
  const std::complex<double> root = std::sqrt(std::complex<double>(eps_re, eps_im));
  return {root.real(), root.imag()};
}

// ---------------------------------------------------------------------------

SpectralTable parse_table(std::istream& in, TableFormat format, const std::string& source) {
  TableMeta meta;
  meta.source = source;
  std::vector<SpectralPoint> points;
  std::vector<std::size_t> lines;
  bool header_seen = false;
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    if (line_no == 1 && raw.rfind("\xEF\xBB\xBF", 0) == 0) raw.erase(0, 3);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      auto take = [&](const char* key, std::string& dst) {
        const std::string k(key);
        if (lower(body.substr(0, k.size())) == k) {
          dst = trim(std::string_view(body).substr(k.size()));
          return true;
        }
        return false;
      };
      std::string ignored;
      if (!take("source:", meta.source) && !take("sample:", meta.sample) &&
          !take("accuracy:", meta.accuracy) && take("note:", ignored)) {
        meta.notes.push_back(ignored);
      }
      continue;
    }

    const auto cells = split_csv(line);
    if (!header_seen) {
      std::vector<std::string> names;
      for (const auto& c : cells) names.push_back(lower(c));
      const std::vector<std::string> eps_header{"omega_ev", "eps_re", "eps_im"};
      const std::vector<std::string> nk_header{"omega_ev", "n", "k"};
      const auto& expected = format == TableFormat::eps ? eps_header : nk_header;
      if (names != expected) {
        throw ParseError(std::string("expected header '") +
                             (format == TableFormat::eps ? "omega_eV,eps_re,eps_im" : "omega_eV,n,k") +
                             "'",
                         line_no);
      }
      header_seen = true;
      continue;
    }

    if (cells.size() != 3) {
      throw ParseError("expected 3 columns, found " + std::to_string(cells.size()), line_no);
    }
    SpectralPoint p;
    p.omega = *parse_number(cells[0], line_no, false);
    if (format == TableFormat::eps) {
      p.eps_re = parse_number(cells[1], line_no, true);
      p.eps_im = parse_number(cells[2], line_no, true);
      if (!p.eps_re && !p.eps_im) throw ParseError("row has neither eps_re nor eps_im", line_no);
    } else {
      const double n = *parse_number(cells[1], line_no, false);
      const double k = *parse_number(cells[2], line_no, false);
      try {
        const auto e = eps_from_nk(n, k);
        p.eps_re = e.re;
        p.eps_im = e.im;
      } catch (const DomainError& e) {
        throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (!(p.omega > 0.0)) {
      throw ValidationError("line " + std::to_string(line_no) + ": omega must be positive");
    }
    if (p.eps_im && *p.eps_im < 0.0) {
      throw ValidationError("line " + std::to_string(line_no) + ": eps_im < 0 violates passivity");
    }
    if (!points.empty() && !(p.omega > points.back().omega)) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": omega not strictly ascending (previous row at line " +
                            std::to_string(lines.back()) + ")");
    }
    points.push_back(p);
    lines.push_back(line_no);
  }
  if (!header_seen) throw ParseError("no header row", 0);
  return SpectralTable(std::move(points), std::move(meta));
}

SpectralTable load_table(const std::filesystem::path& path, TableFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_table(in, format, path.filename().string());
}

void write_table(std::ostream& out, const SpectralTable& table) {
  const auto& m = table.meta();
  if (!m.source.empty()) out << "# source: " << m.source << '\n';
  if (!m.sample.empty()) out << "# sample: " << m.sample << '\n';
  if (!m.accuracy.empty()) out << "# accuracy: " << m.accuracy << '\n';
  for (const auto& n : m.notes) out << "# note: " << n << '\n';
  out << "omega_eV,eps_re,eps_im\n";
  const auto old_flags = out.flags();
  const auto old_prec = out.precision(15);
  out.unsetf(std::ios::floatfield);
  for (const auto& p : table.points()) {
    out << p.omega << ',';
    if (p.eps_re) out << *p.eps_re;
    out << ',';
    if (p.eps_im) out << *p.eps_im;
    out << '\n';
  }
  out.precision(old_prec);
  out.flags(old_flags);
}

void save_table(const std::filesystem::path& path, const SpectralTable& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_table(out, table);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

SpectralTable merge_tables(const SpectralTable& low, const SpectralTable& high, double omega_joint) {
  if (!(omega_joint > 0.0)) throw DomainError("merge_tables: omega_joint must be positive");
  std::vector<SpectralPoint> out;
  for (const auto& p : low.points()) {
    if (p.omega <= omega_joint) out.push_back(p);
  }
  if (out.empty()) {
    throw MergeError("merge_tables: low table has no points at or below omega_joint");
  }
  const std::size_t n_low = out.size();
  for (const auto& p : high.points()) {
    if (p.omega > omega_joint) out.push_back(p);
  }
  if (out.size() > n_low) {
    const double gap = out[n_low].omega / out[n_low - 1].omega;
    if (gap > 10.0) {
      throw MergeError("merge_tables: gap at the joint spans more than one decade (" +
                       std::to_string(out[n_low - 1].omega) + " -> " +
                       std::to_string(out[n_low].omega) + " eV)");
    }
  }

  TableMeta meta = low.meta();
  if (out.size() > n_low) {
    meta.source = low.meta().source + " + " + high.meta().source;
    std::ostringstream note;
    note << "merged at omega_joint=" << std::setprecision(15) << omega_joint << " eV: '"
         << low.meta().source << "' below, '" << high.meta().source << "' above";
    meta.notes.push_back(note.str());
  }
  return SpectralTable(std::move(out), std::move(meta));
}

// ---------------------------------------------------------------------------

double Segment::value(double omega) const {
  const double v = basis == Basis::powers ? omega : 1.0 / omega;
  const double t = (v - center) / scale;
  double acc = coeffs[4];
  for (int j = 3; j >= 0; --j) acc = acc * t + coeffs[j];
  return acc;
}

double Segment::derivative(double omega) const {
  const double v = basis == Basis::powers ? omega : 1.0 / omega;
  const double t = (v - center) / scale;
  double acc = 4.0 * coeffs[4];
  for (int j = 3; j >= 1; --j) acc = acc * t + j * coeffs[j];
  const double dv = basis == Basis::powers ? 1.0 : -1.0 / (omega * omega);
  return acc * dv / scale;
}

SmoothedCurve::SmoothedCurve(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw ValidationError("smoothed curve needs at least one segment");
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto& s = segments_[k];
    if (!(s.omega_hi > s.omega_lo) || !(s.scale > 0.0)) {
      throw ValidationError("degenerate segment " + std::to_string(k));
    }
    if (k == 0) continue;
    const auto& prev = segments_[k - 1];
    if (!(s.omega_lo > prev.omega_lo) || !(s.omega_lo < prev.omega_hi) ||
        !(s.omega_hi > prev.omega_hi)) {
      throw ValidationError("segments " + std::to_string(k - 1) + " and " + std::to_string(k) +
                            " do not overlap properly");
    }
    if (k >= 2 && !(s.omega_lo >= segments_[k - 2].omega_hi)) {
      throw ValidationError("overlap regions " + std::to_string(k - 1) + " and " +
                            std::to_string(k) + " intersect");
    }
  }
}

double SmoothedCurve::evaluate(double omega) const {
  // Overlap k lies between segments k and k+1: [segments[k+1].omega_lo, segments[k].omega_hi].
  for (std::size_t k = 0; k + 1 < segments_.size(); ++k) {
    const double lo = segments_[k + 1].omega_lo;
    const double hi = segments_[k].omega_hi;
    if (omega < lo) return segments_[k].value(omega);
    if (omega <= hi) {
      const double w = smoothstep((omega - lo) / (hi - lo));
      return (1.0 - w) * segments_[k].value(omega) + w * segments_[k + 1].value(omega);
    }
  }
  return segments_.back().value(omega);
}

double SmoothedCurve::derivative(double omega) const {
  for (std::size_t k = 0; k + 1 < segments_.size(); ++k) {
    const double lo = segments_[k + 1].omega_lo;
    const double hi = segments_[k].omega_hi;
    if (omega < lo) return segments_[k].derivative(omega);
    if (omega <= hi) {
      const double t = (omega - lo) / (hi - lo);
      const double w = smoothstep(t);
      const double dw = smoothstep_dt(t) / (hi - lo);
      const double p = segments_[k].value(omega);
      const double q = segments_[k + 1].value(omega);
      return (1.0 - w) * segments_[k].derivative(omega) + w * segments_[k + 1].derivative(omega) +
             dw * (q - p);
    }
  }
  return segments_.back().derivative(omega);
}

std::vector<double> SmoothedCurve::joins() const {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < segments_.size(); ++k) {
    out.push_back(segments_[k + 1].omega_lo);
    out.push_back(segments_[k].omega_hi);
  }
  return out;
}

std::vector<double> SmoothedCurve::breakpoints() const {
  std::vector<double> out{omega_min()};
  for (double j : joins()) out.push_back(j);
  out.push_back(omega_max());
  return out;
}

SmoothedCurve smooth_segments(const SpectralTable& table, Field field, const SmoothingOptions& options) {
  if (options.seg_len < 5) throw DomainError("smooth_segments: seg_len must be at least 5");
  if (options.overlap < 2 || options.overlap >= options.seg_len) {
    throw DomainError("smooth_segments: overlap must be in [2, seg_len)");
  }
  const auto pts = table.with_field(field);
  if (pts.size() < options.seg_len) {
    throw ValidationError("smooth_segments: need at least " + std::to_string(options.seg_len) +
                          " points with the requested field, got " + std::to_string(pts.size()));
  }
  std::vector<double> omega;
  std::vector<double> value;
  for (const auto& p : pts) {
    omega.push_back(p.omega);
    value.push_back(field == Field::eps_re ? *p.eps_re : *p.eps_im);
  }

  const std::size_t n = omega.size();
  const std::size_t step = options.seg_len - options.overlap;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;  // inclusive
  for (std::size_t start = 0; start + options.seg_len <= n; start += step) {
    ranges.emplace_back(start, start + options.seg_len - 1);
  }
  // Leftover points that cannot fill a whole segment join the last one.
  ranges.back().second = n - 1;

  std::vector<Segment> segments;
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    const auto [a, b] = ranges[k];
    const std::size_t len = b - a + 1;
    const Basis basis = k == 0 ? options.first_basis : Basis::powers;
    segments.push_back(fit_segment(std::span<const double>(omega).subspan(a, len),
                                   std::span<const double>(value).subspan(a, len), basis));
  }
  return SmoothedCurve(std::move(segments));
}

}  // namespace lifshitz::spectra
