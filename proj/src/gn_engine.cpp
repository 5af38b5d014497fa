#include "isrsgn/gn_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "isrsgn/errors.hpp"
#include "isrsgn/parallel.hpp"
#include "isrsgn/quadrature_rules.hpp"
#include "isrsgn/units.hpp"

namespace isrsgn {

namespace {

using cplx = std::complex<double>;

constexpr double kPrefactor = 16.0 / 27.0;
constexpr int kMinSubpanelNodes = 3;

bool same_fiber(const FiberSpec& a, const FiberSpec& b) {
  return a.alpha_db_per_km == b.alpha_db_per_km && a.dispersion_ps_nm_km == b.dispersion_ps_nm_km &&
         a.slope_ps_nm2_km == b.slope_ps_nm2_km && a.gamma_per_w_km == b.gamma_per_w_km &&
         a.raman_slope_per_w_thz_km == b.raman_slope_per_w_thz_km &&
         a.ref_wavelength_nm == b.ref_wavelength_nm;
}

// theta-panel of the adaptive outer rule
struct ThetaSegment {
  int quadrant;
  double a;
  double b;
  std::vector<double> kronrod;  // per span-count prefix
  double error;
};

}  // namespace

void QuadratureSpec::validate() const {
  if (nodes_per_panel < 8) throw std::invalid_argument("quadrature: nodes_per_panel must be >= 8");
  if (!(max_panel_phase > 0.0)) throw std::invalid_argument("quadrature: max_panel_phase must be > 0");
  if (!(max_panel_frequency_thz > 0.0))
    throw std::invalid_argument("quadrature: max_panel_frequency_thz must be > 0");
  if (!(theta_panel_width > 0.0)) throw std::invalid_argument("quadrature: theta_panel_width must be > 0");
  if (!(rel_tolerance > 0.0)) throw std::invalid_argument("quadrature: rel_tolerance must be > 0");
  if (!(coherent_periods > 0.0)) throw std::invalid_argument("quadrature: coherent_periods must be > 0");
  if (!(span_kernel_tolerance > 0.0)) throw std::invalid_argument("quadrature: span_kernel_tolerance must be > 0");
  if (channel_points < 1) throw std::invalid_argument("quadrature: channel_points must be >= 1");
  if (cartesian_panels_per_channel < 0)
    throw std::invalid_argument("quadrature: cartesian_panels_per_channel must be >= 0");
  if (band_lo_thz && band_hi_thz && !(*band_lo_thz < *band_hi_thz))
    throw std::invalid_argument("quadrature: band limits must be increasing");
}

double coupling_factor(const ChannelGrid& grid, const SpectralLoad& load, double f1, double f2, double f) {
  const double g = load.psd_at(grid, f);
  if (g <= 0.0) return 0.0;
  const double g1 = load.psd_at(grid, f1);
  const double g2 = load.psd_at(grid, f2);
  const double g3 = load.psd_at(grid, f1 + f2 - f);
  if (g1 <= 0.0 || g2 <= 0.0 || g3 <= 0.0) return 0.0;
  return std::sqrt(g1 * g2 * g3 / g);
}

std::complex<double> span_kernel(const Link& link, std::size_t k, double f1, double f2, double f,
                                 double rel_tolerance) {
  if (k >= link.span_count()) throw std::out_of_range("span_kernel: span index out of range");
  const Span& span = link.span(k);
  const double s = coupling_factor(link.grid(), span.load, f1, f2, f);
  if (s == 0.0) return 0.0;
  const auto& centers = link.grid().center_frequencies();
  const double half = 0.5 * link.grid().channel_bandwidth_thz();
  const double f3 = f1 + f2 - f;
  const double lo = std::min(centers.front() - half, f3);
  const double hi = std::max(centers.back() + half, f3);
  const SpanKernel kernel(RamanProfile(link.grid(), span.load, span.fiber), span.length_km, lo, hi, rel_tolerance);
  const DispersionCoeffs disp = dispersion_coeffs(span.fiber);
  // Phase accumulated before span k, using each preceding span's own fibre.
  double offset = 0.0;
  for (std::size_t j = 0; j < k; ++j)
    offset += phase_mismatch(f1, f2, f, link.span(j).length_km, dispersion_coeffs(link.span(j).fiber));
  const double omega = phase_rate(f1, f2, f, disp);
  return s * kernel.integrate(omega, f3) * std::polar(1.0, offset);
}

// ---------------------------------------------------------------------------

struct NliEngine::Impl {
  struct SpanInfo {
    std::size_t group;
    std::size_t fiber;
    double gamma;
    double length;
    std::vector<double> psd;  // W/THz per slot
  };

  // Scratch space of one evaluation; never shared between threads.
  struct Workspace {
    std::vector<cplx> kernel;
    std::vector<char> kernel_ready;
    std::vector<std::vector<cplx>> weights;
    std::vector<char> weights_ready;
    std::vector<double> coupling;
    std::vector<double> omega;
    std::vector<double> target_psd;
    std::vector<double> acc;
    std::vector<double> breakpoints;
    std::vector<double> cuts;
    std::size_t evaluations = 0;
  };

  Link link;
  QuadratureSpec quad;
  std::vector<SpanInfo> spans;
  std::vector<DispersionCoeffs> fibers;
  std::vector<SpanKernel> groups;
  std::vector<std::size_t> group_geometry;  // groups sharing panel layout and phase rate
  std::vector<std::size_t> geometry_fiber;
  std::vector<double> discontinuities;
  std::vector<const GaussRule*> rules;  // index: node count
  double band_lo = 0.0;
  double band_hi = 0.0;
  double first_center = 0.0;
  double spacing = 0.0;
  double half_bw = 0.0;
  std::size_t slot_count = 0;
  double beta_bound = 0.0;
  double beta_min = 0.0;
  double phase_unit_t = std::numeric_limits<double>::infinity();
  double coherent_t = std::numeric_limits<double>::infinity();
  double min_t = 0.0;

  Impl(const Link& l, QuadratureSpec q) : link(l), quad(std::move(q)) {
    quad.validate();
    rules.assign(static_cast<std::size_t>(quad.nodes_per_panel) + 1, nullptr);
    for (int n = 1; n <= quad.nodes_per_panel; ++n) rules[static_cast<std::size_t>(n)] = &gauss_legendre(n);
    const ChannelGrid& grid = link.grid();
    first_center = grid.center(0);
    spacing = grid.spacing_thz();
    half_bw = 0.5 * grid.channel_bandwidth_thz();
    slot_count = grid.channel_count();

    // Occupied band over all spans and PSD discontinuities.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Span& s : link.spans()) {
      for (std::size_t i = 0; i < slot_count; ++i) {
        if (!s.load.occupied(i)) continue;
        lo = std::min(lo, grid.center(i) - half_bw);
        hi = std::max(hi, grid.center(i) + half_bw);
      }
    }
    if (!std::isfinite(lo)) throw std::invalid_argument("nli engine: link carries no channels");
    band_lo = lo;
    band_hi = hi;
    if (quad.band_lo_thz) {
      if (*quad.band_lo_thz > lo) throw std::invalid_argument("quadrature: band limits do not cover the load");
      band_lo = *quad.band_lo_thz;
    }
    if (quad.band_hi_thz) {
      if (*quad.band_hi_thz < hi) throw std::invalid_argument("quadrature: band limits do not cover the load");
      band_hi = *quad.band_hi_thz;
    }

    auto psd_value = [&](const Span& s, double f) { return s.load.psd_at(grid, f); };
    for (std::size_t i = 0; i < slot_count; ++i) {
      for (double edge : {grid.center(i) - half_bw, grid.center(i) + half_bw}) {
        const double eps = 1e-9 * std::max(spacing, 1e-3);
        bool jump = false;
        for (const Span& s : link.spans()) {
          if (psd_value(s, edge - eps) != psd_value(s, edge + eps)) {
            jump = true;
            break;
          }
        }
        if (jump) discontinuities.push_back(edge);
      }
    }
    std::sort(discontinuities.begin(), discontinuities.end());
    discontinuities.erase(std::unique(discontinuities.begin(), discontinuities.end(),
                                      [&](double a, double b) { return std::abs(a - b) < 1e-12; }),
                          discontinuities.end());

    // Spans sharing fibre, length and load share one kernel.
    std::vector<std::size_t> group_owner;
    for (std::size_t k = 0; k < link.span_count(); ++k) {
      const Span& s = link.span(k);
      SpanInfo info;
      info.gamma = s.fiber.gamma_per_w_km;
      info.length = s.length_km;
      info.psd.resize(slot_count);
      for (std::size_t i = 0; i < slot_count; ++i) info.psd[i] = s.load.power_w(i) / grid.channel_bandwidth_thz();

      info.fiber = fibers.size();
      for (std::size_t j = 0; j < k; ++j) {
        if (same_fiber(link.span(j).fiber, s.fiber)) {
          info.fiber = spans[j].fiber;
          break;
        }
      }
      if (info.fiber == fibers.size()) fibers.push_back(dispersion_coeffs(s.fiber));

      info.group = groups.size();
      for (std::size_t g = 0; g < group_owner.size(); ++g) {
        const Span& o = link.span(group_owner[g]);
        if (o.length_km == s.length_km && same_fiber(o.fiber, s.fiber) && o.load == s.load) {
          info.group = g;
          break;
        }
      }
      if (info.group == groups.size()) {
        groups.emplace_back(RamanProfile(grid, s.load, s.fiber), s.length_km, band_lo, band_hi,
                            quad.span_kernel_tolerance);
        group_owner.push_back(k);
      }
      spans.push_back(std::move(info));
    }

    // Kernels of equal fibre and length share Filon weights at equal panel count.
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const std::size_t fiber = spans[group_owner[g]].fiber;
      const double length = groups[g].length_km();
      std::size_t geo = geometry_fiber.size();
      for (std::size_t h = 0; h < g; ++h) {
        if (spans[group_owner[h]].fiber == fiber && groups[h].length_km() == length) {
          geo = group_geometry[h];
          break;
        }
      }
      if (geo == geometry_fiber.size()) geometry_fiber.push_back(fiber);
      group_geometry.push_back(geo);
    }
    for (std::size_t geo = 0; geo < geometry_fiber.size(); ++geo) {
      std::size_t count = 0;
      for (std::size_t g = 0; g < groups.size(); ++g)
        if (group_geometry[g] == geo) count = std::max(count, groups[g].panel_count());
      for (std::size_t g = 0; g < groups.size(); ++g)
        if (group_geometry[g] == geo) groups[g].refine_to(count);
    }

    // Bounds of |beta2 + pi beta3 (f1 + f2)| over the band, for panel sizing.
    beta_bound = 0.0;
    beta_min = std::numeric_limits<double>::infinity();
    for (const DispersionCoeffs& d : fibers) {
      const double e1 = d.beta2_ps2_per_km + kPi * d.beta3_ps3_per_km * 2.0 * band_lo;
      const double e2 = d.beta2_ps2_per_km + kPi * d.beta3_ps3_per_km * 2.0 * band_hi;
      beta_bound = std::max({beta_bound, std::abs(e1), std::abs(e2)});
      beta_min = std::min(beta_min, (e1 * e2 <= 0.0) ? 0.0 : std::min(std::abs(e1), std::abs(e2)));
    }
    double min_len = std::numeric_limits<double>::infinity();
    double min_alpha = std::numeric_limits<double>::infinity();
    for (const Span& s : link.spans()) {
      min_len = std::min(min_len, s.length_km);
      min_alpha = std::min(min_alpha, s.fiber.alpha_np_per_km());
    }
    const double range = band_hi - band_lo;
    if (beta_bound > 0.0) phase_unit_t = std::sqrt(quad.max_panel_phase / (4.0 * kPi * kPi * beta_bound * link.total_length_km()));
    if (beta_min > 0.0) coherent_t = std::sqrt(2.0 * kPi * quad.coherent_periods / (4.0 * kPi * kPi * beta_min * min_len));
    // Rays are dropped once (f1 - f)(f2 - f) cannot exceed 1e-8 of the
    // dispersion scale alpha / (4 pi^2 beta).
    const double s_scale = beta_bound > 0.0 ? std::min(min_alpha / (4.0 * kPi * kPi * beta_bound), range * range)
                                            : range * range;
    min_t = 1e-4 * std::sqrt(s_scale);
  }

  int slot_of(double f) const {
    const double pos = (f - first_center) / spacing;
    const double nearest = std::round(pos);
    if (nearest < 0.0 || nearest > static_cast<double>(slot_count - 1)) return -1;
    auto i = static_cast<std::size_t>(nearest);
    const double offset = f - (first_center + nearest * spacing);
    if (offset >= -half_bw && offset < half_bw) return static_cast<int>(i);
    if (offset >= half_bw && i + 1 < slot_count && offset - spacing >= -half_bw) return static_cast<int>(i + 1);
    return -1;
  }

  Workspace make_workspace(double f) const {
    Workspace ws;
    ws.kernel.resize(groups.size());
    ws.kernel_ready.resize(groups.size());
    ws.weights.resize(geometry_fiber.size());
    ws.weights_ready.resize(geometry_fiber.size());
    ws.coupling.resize(spans.size());
    ws.omega.resize(fibers.size());
    ws.target_psd.resize(spans.size());
    ws.acc.assign(spans.size(), 0.0);
    const int slot = slot_of(f);
    for (std::size_t k = 0; k < spans.size(); ++k) ws.target_psd[k] = slot < 0 ? 0.0 : spans[k].psd[static_cast<std::size_t>(slot)];
    return ws;
  }

  // Adds weight * |A_n|^2 (or its incoherent far-field average) to acc[n].
  void accumulate(double f, double nu1, double nu2, double weight, bool far, Workspace& ws,
                  std::vector<double>& acc) const {
    const int s1 = slot_of(f + nu1);
    if (s1 < 0) return;
    const int s2 = slot_of(f + nu2);
    if (s2 < 0) return;
    const double f3 = f + nu1 + nu2;
    const int s3 = slot_of(f3);
    if (s3 < 0) return;
    bool any = false;
    for (std::size_t k = 0; k < spans.size(); ++k) {
      const auto& p = spans[k].psd;
      const double g1 = p[static_cast<std::size_t>(s1)];
      const double g2 = p[static_cast<std::size_t>(s2)];
      const double g3 = p[static_cast<std::size_t>(s3)];
      const double gf = ws.target_psd[k];
      double c = 0.0;
      if (g1 > 0.0 && g2 > 0.0 && g3 > 0.0 && gf > 0.0) {
        c = std::sqrt(g1 * g2 * g3 / gf);
        any = true;
      }
      ws.coupling[k] = c;
    }
    if (!any) return;
    ++ws.evaluations;
    const double f1_plus_f2 = 2.0 * f + nu1 + nu2;
    const double product = nu1 * nu2;
    for (std::size_t i = 0; i < fibers.size(); ++i) {
      const auto& d = fibers[i];
      ws.omega[i] = -4.0 * kPi * kPi * product * (d.beta2_ps2_per_km + kPi * d.beta3_ps3_per_km * f1_plus_f2);
    }

    if (far) {
      double power = 0.0;
      for (std::size_t k = 0; k < spans.size(); ++k) {
        const double c = ws.coupling[k];
        if (c > 0.0) {
          const double gc = spans[k].gamma * c;
          power += gc * gc * groups[spans[k].group].averaged_power(ws.omega[spans[k].fiber], f3);
        }
        acc[k] += weight * power;
      }
      return;
    }

    std::fill(ws.kernel_ready.begin(), ws.kernel_ready.end(), 0);
    std::fill(ws.weights_ready.begin(), ws.weights_ready.end(), 0);
    cplx field = 0.0;
    cplx phase = 1.0;
    for (std::size_t k = 0; k < spans.size(); ++k) {
      const SpanInfo& sp = spans[k];
      const double omega = ws.omega[sp.fiber];
      const double c = ws.coupling[k];
      if (c > 0.0) {
        if (!ws.kernel_ready[sp.group]) {
          const std::size_t geo = group_geometry[sp.group];
          if (!ws.weights_ready[geo]) {
            groups[sp.group].filon_weights(omega, ws.weights[geo]);
            ws.weights_ready[geo] = 1;
          }
          ws.kernel[sp.group] = groups[sp.group].apply_weights(ws.weights[geo], f3);
          ws.kernel_ready[sp.group] = 1;
        }
        field += (sp.gamma * c) * ws.kernel[sp.group] * phase;
      }
      acc[k] += weight * std::norm(field);
      if (k + 1 < spans.size()) phase *= std::polar(1.0, omega * sp.length);
    }
  }

  double exit_parameter(double f, double d) const {
    if (d > 0.0) return (band_hi - f) / d;
    if (d < 0.0) return (band_lo - f) / d;
    return std::numeric_limits<double>::infinity();
  }

  // integral over t of 2t F(t d1, t d2) along one ray; adds into acc.
  void ray(double f, double d1, double d2, Workspace& ws, std::vector<double>& acc) const {
    const double d3 = d1 + d2;
    const double t_exit = std::min({exit_parameter(f, d1), exit_parameter(f, d2), exit_parameter(f, d3)});
    if (!(t_exit > 0.0)) return;
    // PSD jumps crossed by f1, f2 or f3 along the ray.
    auto& cuts = ws.cuts;
    cuts.clear();
    for (double d : {d1, d2, d3}) {
      if (d == 0.0) continue;
      const double end = f + d * t_exit;
      const double lo = std::min(f, end);
      const double hi = std::max(f, end);
      auto it = std::upper_bound(discontinuities.begin(), discontinuities.end(), lo);
      for (; it != discontinuities.end() && *it < hi; ++it) cuts.push_back((*it - f) / d);
    }
    std::sort(cuts.begin(), cuts.end());

    // Panels of bounded phase increment up to the coherence limit, then
    // geometrically growing panels.
    auto& bp = ws.breakpoints;
    bp.clear();
    bp.push_back(0.0);
    const double t_near_end = std::min(coherent_t, t_exit);
    if (std::isfinite(phase_unit_t)) {
      for (std::size_t j = 1;; ++j) {
        const double t = phase_unit_t * std::sqrt(static_cast<double>(j));
        if (t >= t_near_end) break;
        bp.push_back(t);
      }
    }
    if (coherent_t < t_exit) {
      bp.push_back(coherent_t);
      for (double t = 2.0 * coherent_t; t < t_exit; t *= 2.0) bp.push_back(t);
    }
    bp.push_back(t_exit);

    const double dmax = std::max({std::abs(d1), std::abs(d2), std::abs(d3)});
    const double max_dt = quad.max_panel_frequency_thz / dmax;
    const int full = quad.nodes_per_panel;
    const double tiny = 1e-13 * t_exit;
    std::size_t next_cut = 0;
    auto panel = [&](double a, double b, int nodes, bool far) {
      const GaussRule& rule = *rules[static_cast<std::size_t>(nodes)];
      const double half = 0.5 * (b - a);
      const double mid = a + half;
      for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
        const double t = mid + half * rule.nodes[n];
        accumulate(f, t * d1, t * d2, half * rule.weights[n] * 2.0 * t, far, ws, acc);
      }
    };
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      const double a = bp[i];
      const double b = bp[i + 1];
      if (b - a <= tiny) continue;
      const bool far = a >= coherent_t;
      const auto parts = static_cast<std::size_t>(std::ceil((b - a) / max_dt));
      const double width = (b - a) / static_cast<double>(parts);
      for (std::size_t p = 0; p < parts; ++p) {
        const double pa = a + width * static_cast<double>(p);
        const double pb = p + 1 == parts ? b : pa + width;
        // Sub-panels between PSD jumps get nodes in proportion to their width.
        double lo = pa;
        while (next_cut < cuts.size() && cuts[next_cut] <= pa) ++next_cut;
        while (true) {
          const bool last = next_cut >= cuts.size() || cuts[next_cut] >= pb;
          const double hi = last ? pb : cuts[next_cut++];
          if (hi - lo > tiny) {
            const int nodes = lo == pa && last
                                  ? full
                                  : std::clamp(static_cast<int>(std::ceil(full * (hi - lo) / (pb - pa))),
                                               kMinSubpanelNodes, full);
            panel(lo, hi, nodes, far);
          }
          lo = hi;
          if (last) break;
        }
      }
    }
  }

  // theta integrand for one quadrant, per span-count prefix.
  void theta_integrand(double f, int quadrant, double theta, Workspace& ws, std::vector<double>& out) const {
    const double e = std::exp(theta);
    const double s1 = quadrant == 1 ? -1.0 : 1.0;
    const double s2 = quadrant == 0 ? 1.0 : -1.0;
    std::fill(out.begin(), out.end(), 0.0);
    ray(f, s1 * e, s2 / e, ws, out);
  }

  ThetaSegment integrate_segment(double f, int quadrant, double a, double b, Workspace& ws) const {
    const KronrodRule& rule = gauss_kronrod15();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    ThetaSegment seg{quadrant, a, b, std::vector<double>(spans.size(), 0.0), 0.0};
    std::vector<double> gauss(spans.size(), 0.0);
    std::vector<double> value(spans.size(), 0.0);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      theta_integrand(f, quadrant, mid + half * rule.nodes[i], ws, value);
      for (std::size_t n = 0; n < spans.size(); ++n) {
        seg.kronrod[n] += half * rule.kronrod_weights[i] * value[n];
        gauss[n] += half * rule.gauss_weights[i] * value[n];
      }
    }
    seg.error = std::abs(seg.kronrod.back() - gauss.back());
    return seg;
  }

  PsdEvaluation evaluate_hyperbolic(double f) const {
    Workspace ws = make_workspace(f);
    const double range = band_hi - band_lo;
    const double theta_max = std::log(range / min_t);
    std::vector<ThetaSegment> segments;
    auto add_range = [&](int quadrant, double lo, double hi) {
      const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / quad.theta_panel_width));
      const double w = (hi - lo) / static_cast<double>(count);
      for (std::size_t i = 0; i < count; ++i)
        segments.push_back(integrate_segment(f, quadrant, lo + w * static_cast<double>(i),
                                             i + 1 == count ? hi : lo + w * static_cast<double>(i + 1), ws));
    };
    // f1 <-> f2 symmetry: (+,+) and (-,-) over theta >= 0, (+,-) over all theta,
    // each counted twice.
    add_range(0, 0.0, theta_max);
    add_range(1, 0.0, theta_max);
    add_range(2, -theta_max, theta_max);

    auto totals = [&] {
      double value = 0.0;
      double error = 0.0;
      for (const auto& s : segments) {
        value += s.kronrod.back();
        error += s.error;
      }
      return std::pair{value, error};
    };
    auto [value, error] = totals();
    while (error > quad.rel_tolerance * std::abs(value)) {
      if (segments.size() >= quad.max_theta_panels) {
        throw QuadratureError("nli_psd: adaptive theta integration did not converge (estimated relative error " +
                                  std::to_string(error / std::abs(value)) + ")",
                              error / std::abs(value));
      }
      auto worst = std::max_element(segments.begin(), segments.end(),
                                    [](const ThetaSegment& x, const ThetaSegment& y) { return x.error < y.error; });
      const ThetaSegment old = *worst;
      const double m = 0.5 * (old.a + old.b);
      *worst = integrate_segment(f, old.quadrant, old.a, m, ws);
      segments.push_back(integrate_segment(f, old.quadrant, m, old.b, ws));
      std::tie(value, error) = totals();
    }

    // Fixed-order reduction.
    std::sort(segments.begin(), segments.end(), [](const ThetaSegment& x, const ThetaSegment& y) {
      return x.quadrant != y.quadrant ? x.quadrant < y.quadrant : x.a < y.a;
    });
    PsdEvaluation out;
    out.by_span_count.assign(spans.size(), 0.0);
    for (const auto& s : segments)
      for (std::size_t n = 0; n < spans.size(); ++n) out.by_span_count[n] += s.kronrod[n];
    const double scale = 2.0 * kPrefactor * ws.target_psd[0];
    for (double& v : out.by_span_count) v *= scale;
    out.estimated_rel_error = value != 0.0 ? error / std::abs(value) : 0.0;
    out.integrand_evaluations = ws.evaluations;
    return out;
  }

  // Support of the PSD (union over spans) as merged intervals.
  std::vector<std::pair<double, double>> support() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < slot_count; ++i) {
      bool occ = false;
      for (const auto& s : spans) occ = occ || s.psd[i] > 0.0;
      if (!occ) continue;
      const double c = first_center + spacing * static_cast<double>(i);
      const double a = c - half_bw;
      const double b = c + half_bw;
      if (!out.empty() && a - out.back().second < 1e-12) {
        out.back().second = b;
      } else {
        out.emplace_back(a, b);
      }
    }
    return out;
  }

  PsdEvaluation evaluate_cartesian(double f) const {
    Workspace ws = make_workspace(f);
    const GaussRule& rule = gauss_legendre(quad.nodes_per_panel);
    const auto intervals = support();
    const double range = band_hi - band_lo;
    // The phase rate along f2 is proportional to |f1 - f|, along f1 to |f2 - f|.
    const double phase_scale = 4.0 * kPi * kPi * beta_bound * link.total_length_km();
    const double panel_phase = quad.max_panel_phase / 4.0;
    double h_fixed = quad.max_panel_frequency_thz / 4.0;
    if (quad.cartesian_panels_per_channel > 0) h_fixed = 2.0 * half_bw / quad.cartesian_panels_per_channel;
    auto step = [&](double excursion) {
      if (phase_scale <= 0.0 || quad.cartesian_panels_per_channel > 0) return h_fixed;
      return std::min(h_fixed, panel_phase / (phase_scale * std::max(excursion, 1e-6 * range)));
    };
    const double h_outer = step(range);
    std::vector<double> acc(spans.size(), 0.0);
    std::vector<double> bp;
    auto panels = [&](std::vector<double>& points, double h, auto&& fn) {
      std::sort(points.begin(), points.end());
      for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double a = points[i];
        const double b = points[i + 1];
        if (b - a <= 1e-14) continue;
        const auto parts = static_cast<std::size_t>(std::ceil((b - a) / h));
        const double width = (b - a) / static_cast<double>(parts);
        for (std::size_t p = 0; p < parts; ++p) {
          const double half = 0.5 * width;
          const double mid = a + width * static_cast<double>(p) + half;
          for (std::size_t n = 0; n < rule.nodes.size(); ++n) fn(mid + half * rule.nodes[n], half * rule.weights[n]);
        }
      }
    };

    std::vector<double> outer;
    for (const auto& [a, b] : intervals) {
      outer.push_back(a);
      outer.push_back(b);
    }
    for (double x : discontinuities) outer.push_back(x);
    panels(outer, h_outer, [&](double f1, double w1) {
      bp.clear();
      for (const auto& [a, b] : intervals) {
        bp.push_back(a);
        bp.push_back(b);
      }
      for (double x : discontinuities) bp.push_back(x);
      // f3 = f1 + f2 - f crosses a discontinuity
      for (double x : discontinuities) bp.push_back(x - f1 + f);
      std::vector<double> inner;
      for (double x : bp)
        if (x >= band_lo && x <= band_hi) inner.push_back(x);
      panels(inner, step(std::abs(f1 - f)), [&](double f2, double w2) { accumulate(f, f1 - f, f2 - f, w1 * w2, false, ws, acc); });
    });

    PsdEvaluation out;
    out.by_span_count = acc;
    const double scale = kPrefactor * ws.target_psd[0];
    for (double& v : out.by_span_count) v *= scale;
    out.integrand_evaluations = ws.evaluations;
    return out;
  }
};

NliEngine::NliEngine(const Link& link, QuadratureSpec quad) : impl_(std::make_unique<Impl>(link, std::move(quad))) {}
NliEngine::~NliEngine() = default;
NliEngine::NliEngine(NliEngine&&) noexcept = default;
NliEngine& NliEngine::operator=(NliEngine&&) noexcept = default;

const Link& NliEngine::link() const { return impl_->link; }
const QuadratureSpec& NliEngine::quadrature() const { return impl_->quad; }

PsdEvaluation NliEngine::evaluate(double f_thz) const {
  const int slot = impl_->slot_of(f_thz);
  if (slot < 0 || impl_->spans.front().psd[static_cast<std::size_t>(slot)] <= 0.0)
    throw std::invalid_argument("nli_psd: frequency is not inside a channel occupied in the first span");
  if (impl_->quad.scheme == QuadratureScheme::cartesian_oracle) return impl_->evaluate_cartesian(f_thz);
  return impl_->evaluate_hyperbolic(f_thz);
}

double NliEngine::integrand(double f1, double f2, double f) const {
  Impl::Workspace ws = impl_->make_workspace(f);
  std::vector<double> acc(impl_->spans.size(), 0.0);
  impl_->accumulate(f, f1 - f, f2 - f, 1.0, false, ws, acc);
  return acc.back();
}

std::vector<double> NliEngine::channel_sigma2_by_span_count(std::size_t channel) const {
  const ChannelGrid& grid = impl_->link.grid();
  if (channel >= grid.channel_count()) throw std::out_of_range("integrate_channel: channel index out of range");
  if (!impl_->link.span(0).load.occupied(channel))
    throw std::invalid_argument("integrate_channel: channel is not occupied in the first span");
  const GaussRule& rule = gauss_legendre(impl_->quad.channel_points);
  const double half = 0.5 * grid.channel_bandwidth_thz();
  std::vector<double> sigma2(impl_->spans.size(), 0.0);
  for (std::size_t m = 0; m < rule.nodes.size(); ++m) {
    const double f = grid.center(channel) + half * rule.nodes[m];
    const PsdEvaluation e = evaluate(f);
    for (std::size_t n = 0; n < sigma2.size(); ++n) sigma2[n] += half * rule.weights[m] * e.by_span_count[n];
  }
  return sigma2;
}

double nli_psd(const Link& link, double f_thz, const QuadratureSpec& quad) {
  return NliEngine(link, quad).psd(f_thz);
}

double integrate_channel(const Link& link, std::size_t channel, const QuadratureSpec& quad) {
  return NliEngine(link, quad).channel_sigma2(channel);
}

std::vector<std::size_t> end_to_end_channels(const Link& link) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < link.grid().channel_count(); ++i) {
    bool all = true;
    for (const Span& s : link.spans()) all = all && s.load.occupied(i);
    if (all) out.push_back(i);
  }
  return out;
}

std::vector<NliReport> snr_report_by_span_count(const Link& link, const QuadratureSpec& quad,
                                                std::optional<std::vector<std::size_t>> channels,
                                                unsigned threads) {
  std::vector<std::size_t> list = channels ? *channels : end_to_end_channels(link);
  std::sort(list.begin(), list.end());
  list.erase(std::unique(list.begin(), list.end()), list.end());
  const NliEngine engine(link, quad);
  std::vector<std::vector<double>> sigma2(list.size());
  parallel_for(list.size(), threads,
               [&](std::size_t i) { sigma2[i] = engine.channel_sigma2_by_span_count(list[i]); });
  std::vector<NliReport> reports(link.span_count());
  for (std::size_t n = 0; n < link.span_count(); ++n) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::size_t ch = list[i];
      const double p = link.span(0).load.power_w(ch);
      const double s2 = sigma2[i][n];
      reports[n].entries.push_back({ch, link.grid().center(ch), p, s2, linear_to_db(p / s2)});
    }
  }
  return reports;
}

NliReport snr_report(const Link& link, const QuadratureSpec& quad, std::optional<std::vector<std::size_t>> channels,
                     unsigned threads) {
  return snr_report_by_span_count(link, quad, std::move(channels), threads).back();
}

}  // namespace isrsgn
