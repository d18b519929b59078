#include "nlslab/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "nlslab/errors.hpp"
#include "nlslab/fft.hpp"
#include "nlslab/kernels.hpp"
#include "nlslab/quadrature.hpp"
#include "nlslab/spectral.hpp"
#include "nlslab/threads.hpp"

namespace nlslab {

namespace {

constexpr cplx kI{0.0, 1.0};

double parity(std::ptrdiff_t kk) { return (kk & 1) ? -1.0 : 1.0; }

// Frequency-side L^2 norm of scaled coefficients.
double coeff_norm(const std::vector<cplx>& F, double L) {
  double s = 0.0;
  for (const auto& v : F) s += std::norm(v);
  return std::sqrt(s / L);
}

std::size_t subpanels(double a, double b, int P) {
  const double by_decade = std::ceil(P * std::log10(b / a) - 1e-12);
  const double by_length = std::ceil((b - a) * P / (4.0 * kPi) - 1e-12);
  return static_cast<std::size_t>(std::max({1.0, by_decade, by_length}));
}

QuadratureRule interval_rule(double a, double b, int P) { return gauss_legendre(a, b, subpanels(a, b, P)); }

cplx interpolate_remainder(const ModeTrace& tr, double tau) {
  const auto& ts = tr.times;
  if (ts.empty()) return {};
  if (tau <= ts.front()) return tr.remainder.front();
  if (tau >= ts.back()) return tr.remainder.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), tau);
  const std::size_t i = static_cast<std::size_t>(it - ts.begin());
  const double w = (std::log(tau) - std::log(ts[i - 1])) / (std::log(ts[i]) - std::log(ts[i - 1]));
  return (1.0 - w) * tr.remainder[i - 1] + w * tr.remainder[i];
}

// Per-grid tables shared by every quadrature node.
struct SourceTables {
  const SourceSpec& spec;
  const SpectralGrid& g;
  std::vector<double> xi;
  std::vector<double> uhat;
  std::vector<double> fscale;  // dx * (-1)^k: raw DFT -> scaled coefficients
  std::vector<double> iscale;  // (-1)^k / L: scaled coefficients -> raw inverse DFT
  std::map<int, std::vector<cplx>> wave;  // e^{ixj/2}
  double M;
  int sigma;

  SourceTables(const SourceSpec& s, const SpectralGrid& grid)
      : spec(s), g(grid), M(s.train.mass()), sigma(s.train.sign) {
    const std::size_t n = g.size();
    xi.resize(n);
    uhat.resize(n);
    fscale.resize(n);
    iscale.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      xi[k] = g.frequency(k);
      uhat[k] = spec.profile.hat(xi[k]);
      fscale[k] = g.spacing() * parity(g.wavenumber(k));
      iscale[k] = parity(g.wavenumber(k)) / g.length();
    }
    for (const auto& [j, a] : spec.train.alphas) {
      if (!g.half_integer_slot(j)) {
        throw ConfigError("Dirac mode j=" + std::to_string(j) + " is beyond the grid's Nyquist frequency");
      }
      std::vector<cplx> e(n);
      for (std::size_t i = 0; i < n; ++i) e[i] = std::polar(1.0, 0.5 * j * g.x(i));
      wave.emplace(j, std::move(e));
    }
  }

  void synth(const std::map<int, cplx>& coeffs, std::vector<cplx>& out) const {
    std::fill(out.begin(), out.end(), cplx{});
    for (const auto& [j, c] : coeffs) {
      const auto& e = wave.at(j);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * e[i];
    }
  }
};

struct NodeScratch {
  std::vector<cplx> U, A, AR, F, phase;
  explicit NodeScratch(std::size_t n) : U(n), A(n), AR(n), F(n), phase(n) {}
};

// Physical integrand F(tau) for one tag, written to s.F. Needs s.U, s.A (and s.AR for Jb).
void build_integrand(const SourceTables& tb, SourceTag tag, const std::map<int, cplx>& coeffs, NodeScratch& s) {
  const std::size_t n = s.F.size();
  const double M = tb.M;
  switch (tag) {
    case SourceTag::Ja:
      for (std::size_t i = 0; i < n; ++i) s.F[i] = 2.0 * (std::norm(s.A[i]) - M) * s.U[i];
      break;
    case SourceTag::Jb:
      for (std::size_t i = 0; i < n; ++i) s.F[i] = 2.0 * (std::norm(s.AR[i]) - std::norm(s.A[i])) * s.U[i];
      break;
    case SourceTag::Jc:
      for (std::size_t i = 0; i < n; ++i) s.F[i] = s.A[i] * s.A[i] * std::conj(s.U[i]);
      break;
    case SourceTag::Jd:
      for (std::size_t i = 0; i < n; ++i) {
        s.F[i] = 2.0 * s.A[i] * std::norm(s.U[i]) + std::conj(s.A[i]) * s.U[i] * s.U[i];
      }
      break;
    case SourceTag::Je:
      for (std::size_t i = 0; i < n; ++i) s.F[i] = std::norm(s.U[i]) * s.U[i];
      break;
    case SourceTag::Jn: {
      // Resonant part of (|A|^2 - 2M) A at mode j is -|c_j|^2 c_j; remove it.
      for (std::size_t i = 0; i < n; ++i) s.F[i] = (std::norm(s.A[i]) - 2.0 * M) * s.A[i];
      for (const auto& [j, c] : coeffs) {
        const auto& e = tb.wave.at(j);
        const cplx r = std::norm(c) * c;
        for (std::size_t i = 0; i < n; ++i) s.F[i] += r * e[i];
      }
      break;
    }
  }
}

// Fills s.U, s.A, s.AR at tau and returns the R = 0 train coefficients.
std::map<int, cplx> prepare_node(const SourceTables& tb, double tau, bool need_R, NodeScratch& s) {
  const std::size_t n = tb.g.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double x = tb.xi[k];
    s.phase[k] = std::polar(1.0, tau * x * x);
    s.U[k] = tb.uhat[k] == 0.0 ? cplx{} : tb.uhat[k] * std::conj(s.phase[k]) * tb.iscale[k];
  }
  fft::backward(s.U.data(), s.U.data(), n);
  const auto coeffs = dirac_coefficients(tb.spec.train, tau);
  tb.synth(coeffs, s.A);
  if (need_R) {
    ModeRemainders R;
    if (tb.spec.traces) {
      for (const auto& tr : *tb.spec.traces) R[tr.j] = interpolate_remainder(tr, tau);
    }
    tb.synth(dirac_coefficients(tb.spec.train, tau, &R), s.AR);
  }
  return coeffs;
}

bool tag_vanishes(const SourceSpec& spec, SourceTag tag) {
  const bool no_u = spec.profile.is_zero();
  const bool no_a = spec.train.empty();
  switch (tag) {
    case SourceTag::Ja: {
      int nonzero = 0;
      for (const auto& [j, a] : spec.train.alphas) nonzero += a != cplx{};
      return no_u || nonzero < 2;
    }
    case SourceTag::Jb: return no_u || no_a || spec.traces == nullptr;
    case SourceTag::Jc:
    case SourceTag::Jd: return no_u || no_a;
    case SourceTag::Je: return no_u;
    case SourceTag::Jn: return no_a;
  }
  return false;
}

}  // namespace

std::string to_string(SourceTag tag) {
  switch (tag) {
    case SourceTag::Ja: return "Ja";
    case SourceTag::Jb: return "Jb";
    case SourceTag::Jc: return "Jc";
    case SourceTag::Jd: return "Jd";
    case SourceTag::Je: return "Je";
    case SourceTag::Jn: return "Jn";
  }
  return "?";
}

SourceTag parse_source_tag(const std::string& name) {
  for (SourceTag t : all_source_tags()) {
    if (to_string(t) == name) return t;
  }
  throw ConfigError("unknown source term '" + name + "'");
}

const std::vector<SourceTag>& all_source_tags() {
  static const std::vector<SourceTag> tags{SourceTag::Ja, SourceTag::Jb, SourceTag::Jc,
                                           SourceTag::Jd, SourceTag::Je, SourceTag::Jn};
  return tags;
}

SourceSeries compute_source_terms(const SourceSpec& spec, const std::vector<double>& times, const SpectralGrid& grid,
                                  const std::vector<SourceTag>& tags) {
  if (times.empty()) throw ConfigError("source terms need at least one time");
  if (spec.panels_per_decade < 4) throw ConfigError("picard.panels_per_decade must be >= 4");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
      throw ConfigError("source-term times must be positive and increasing");
    }
  }
  if (!(spec.T_max >= times.back())) throw ConfigError("T_max must be >= every source-term time");

  const std::size_t n = grid.size();
  SourceSeries out;
  out.times = times;

  std::vector<SourceTag> active;
  for (SourceTag t : tags) {
    if (tag_vanishes(spec, t)) {
      out.terms[t] = std::vector<ComplexField>(times.size(), ComplexField(grid, Representation::physical));
      out.tail_estimate[t] = 0.0;
    } else {
      active.push_back(t);
    }
  }
  if (active.empty()) return out;

  const SourceTables tb(spec, grid);
  const bool need_R = std::find(active.begin(), active.end(), SourceTag::Jb) != active.end();

  // Interval edges: the requested times plus T_max on top.
  std::vector<double> edges = times;
  if (edges.back() < spec.T_max) edges.push_back(spec.T_max);
  const std::size_t n_int = edges.size() - 1;
  const std::size_t n_tag = active.size();

  // partial[i][tag]: interaction-picture integral over [edges[i], edges[i+1]].
  std::vector<std::vector<std::vector<cplx>>> partial(n_int, std::vector<std::vector<cplx>>(n_tag));
  std::vector<std::size_t> node_counts(n_int, 0);

  const auto n_int_signed = static_cast<std::ptrdiff_t>(n_int);
#pragma omp parallel num_threads(worker_count())
  {
    NodeScratch s(n);
#pragma omp for schedule(dynamic, 1)
    for (std::ptrdiff_t ii = 0; ii < n_int_signed; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      for (auto& acc : partial[i]) acc.assign(n, cplx{});
      const QuadratureRule r = interval_rule(edges[i], edges[i + 1], spec.panels_per_decade);
      node_counts[i] = r.size();
      for (std::size_t q = 0; q < r.size(); ++q) {
        const double tau = r.nodes[q];
        const auto coeffs = prepare_node(tb, tau, need_R, s);
        const double c = r.weights[q] * tb.sigma / (2.0 * tau);
        for (std::size_t a = 0; a < n_tag; ++a) {
          build_integrand(tb, active[a], coeffs, s);
          fft::forward(s.F.data(), s.F.data(), n);
          auto& acc = partial[i][a];
          for (std::size_t k = 0; k < n; ++k) acc[k] += c * tb.fscale[k] * s.phase[k] * s.F[k];
        }
      }
    }
  }
  for (auto c : node_counts) out.nodes += c;

  // Tail size estimate from the integrand at T_max, assuming tau^{-3/2} decay.
  {
    NodeScratch s(n);
    const auto coeffs = prepare_node(tb, spec.T_max, need_R, s);
    for (SourceTag t : active) {
      build_integrand(tb, t, coeffs, s);
      double acc = 0.0;
      for (const auto& v : s.F) acc += std::norm(v);
      out.tail_estimate[t] = std::sqrt(acc * grid.spacing());
    }
  }

  for (std::size_t a = 0; a < n_tag; ++a) {
    auto& series = out.terms[active[a]];
    series.assign(times.size(), ComplexField(grid, Representation::physical));
    std::vector<cplx> cum(n, cplx{});
    for (std::size_t ti = times.size(); ti-- > 0;) {
      // Interval ti spans [times[ti], edges[ti+1]].
      if (ti < n_int) {
        const auto& p = partial[ti][a];
        for (std::size_t k = 0; k < n; ++k) cum[k] += p[k];
      }
      ComplexField F(grid, Representation::frequency);
      const double t = times[ti];
      for (std::size_t k = 0; k < n; ++k) F[k] = -kI * std::polar(1.0, -t * tb.xi[k] * tb.xi[k]) * cum[k];
      series[ti] = from_fourier(F);
    }
  }
  return out;
}

SourceSeries compute_source_terms_checked(const SourceSpec& spec, const std::vector<double>& times,
                                          const SpectralGrid& grid, const std::vector<SourceTag>& tags, double rtol) {
  const SourceSeries coarse = compute_source_terms(spec, times, grid, tags);
  SourceSpec fine_spec = spec;
  fine_spec.panels_per_decade = 2 * spec.panels_per_decade;
  SourceSeries fine = compute_source_terms(fine_spec, times, grid, tags);
  for (const auto& [tag, series] : fine.terms) {
    const auto& other = coarse.terms.at(tag);
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double nf = l2_norm(series[i]);
      const double gap = l2_norm(series[i] - other[i]);
      if (gap > rtol * nf && gap > 1e-14) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "source term %s at t=%.6g changed by %.3e relative when doubling panels (limit %.1e)",
                      to_string(tag).c_str(), times[i], nf > 0 ? gap / nf : gap, rtol);
        throw QuadratureError(buf);
      }
    }
  }
  return fine;
}

ComplexField source_term(const SourceSpec& spec, SourceTag tag, double t, const SpectralGrid& grid) {
  return compute_source_terms(spec, {t}, grid, {tag}).terms.at(tag).front();
}

IbpParts source_term_ibp(const SourceSpec& spec, SourceTag tag, double t, const SpectralGrid& grid) {
  if (tag != SourceTag::Ja && tag != SourceTag::Jc) {
    throw ConfigError("the integration-by-parts form exists for Ja and Jc only");
  }
  if (!(spec.T_max > t)) throw ConfigError("T_max must exceed t");
  const std::size_t n = grid.size();
  ComplexField B(grid, Representation::frequency), Rm(grid, Representation::frequency);
  const auto& train = spec.train;
  const double M = train.mass();
  const int sigma = train.sign;
  const double T = spec.T_max;
  const QuadratureRule rule = interval_rule(t, T, spec.panels_per_decade);
  auto rate = [&](int j) { return train.law.rate(std::norm(train.alphas.at(j)), M, sigma); };

  for (const auto& [j, aj] : train.alphas) {
    for (const auto& [p, ap] : train.alphas) {
      if (tag == SourceTag::Ja && j == p) continue;
      // Ja: coefficient conj(a_j) a_p, eta = xi - (j-p)/2, omega = (j-p)(eta - p/2),
      //     Lambda = r_j - r_p, profile hat(eta)/(eta - p/2) / (j - p), prefactor -i sigma.
      // Jc: coefficient conj(a_j a_p), eta = (j+p)/2 - xi, omega = 2(eta - j/2)(eta - p/2),
      //     Lambda = r_j + r_p, profile hat(eta)/((eta - j/2)(eta - p/2)) / 2, prefactor -i sigma/2.
      const bool is_a = tag == SourceTag::Ja;
      const cplx coef = is_a ? std::conj(aj) * ap : std::conj(aj * ap);
      if (coef == cplx{}) continue;
      const double Lambda = is_a ? rate(j) - rate(p) : rate(j) + rate(p);
      const ShiftedProfile shifted{&spec.profile, is_a ? std::vector<int>{-p} : std::vector<int>{-j, -p}};
      const double div = is_a ? double(j - p) : 2.0;
      const cplx pref = is_a ? -kI * double(sigma) : -kI * (0.5 * sigma);

      // Remainder amplitude (i Lambda - 1) tau^{i Lambda - 2} at the nodes.
      std::vector<cplx> amps(rule.size());
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double tau = rule.nodes[q];
        amps[q] = rule.weights[q] * cplx(-1.0, Lambda) * std::polar(1.0, Lambda * std::log(tau)) / (tau * tau);
      }
      std::vector<std::size_t> slots;
      std::vector<double> omegas, etas;
      for (std::size_t k = 0; k < n; ++k) {
        const double xi = grid.frequency(k);
        const double eta = is_a ? xi - 0.5 * (j - p) : 0.5 * (j + p) - xi;
        if (spec.profile.hat(eta) == 0.0) continue;
        slots.push_back(k);
        etas.push_back(eta);
        omegas.push_back(is_a ? (j - p) * (eta - 0.5 * p) : 2.0 * (eta - 0.5 * j) * (eta - 0.5 * p));
      }
      std::vector<cplx> rem(slots.size());
      parallel::trig_sum(rule.nodes, amps, omegas, rem);
      for (std::size_t s = 0; s < slots.size(); ++s) {
        const std::size_t k = slots[s];
        const double xi = grid.frequency(k);
        const double om = omegas[s];
        const double prof = shifted.hat(etas[s]) / div;  // hat(eta) / omega, up to the omega factor
        // hat/omega = prof; boundary [e^{i om tau} tau^{i Lambda - 1}]_t^T / i, remainder -(1/i) * rem.
        auto edge = [&](double tau) { return std::polar(1.0 / tau, om * tau + Lambda * std::log(tau)); };
        const cplx prop = std::polar(1.0, -t * xi * xi);
        B[k] += pref * coef * prop * prof * (edge(T) - edge(t)) / kI;
        Rm[k] += pref * coef * prop * prof * (-rem[s] / kI);
      }
    }
  }
  IbpParts parts{from_fourier(B), from_fourier(Rm), ComplexField(grid, Representation::physical)};
  parts.total = parts.boundary + parts.remainder;
  return parts;
}

FieldFamily sample_v1_family(const DiracTrain& train, const ScatteringProfile& u, const std::vector<double>& times,
                             const SpectralGrid& grid) {
  FieldFamily f;
  f.times = times;
  for (double t : times) f.fields.push_back(sample_v1(train, u, t, grid));
  return f;
}

FieldFamily difference(const FieldFamily& a, const FieldFamily& b) {
  if (a.size() != b.size()) throw ConfigError("field families differ in length");
  FieldFamily d;
  d.times = a.times;
  for (std::size_t i = 0; i < a.size(); ++i) d.fields.push_back(as_physical(a.fields[i]) - as_physical(b.fields[i]));
  return d;
}

IResult functional_I(const FieldFamily& v, const FieldFamily& v1, double M, int sigma) {
  if (v.size() != v1.size() || v.size() == 0) throw ConfigError("functional_I needs matching nonempty families");
  const std::size_t N = v.size();
  const SpectralGrid& g = v.fields.front().grid();
  const std::size_t n = g.size();
  std::vector<double> xi(n), fscale(n);
  for (std::size_t k = 0; k < n; ++k) {
    xi[k] = g.frequency(k);
    fscale[k] = g.spacing() * parity(g.wavenumber(k));
  }
  // H_i = tau e^{i tau xi^2} FT[(sigma/2tau)(N(v) - N(v1))](tau_i): integrand in s = ln tau.
  std::vector<std::vector<cplx>> H(N, std::vector<cplx>(n));
  bool all_zero = true;
  for (std::size_t i = 0; i < N; ++i) {
    const double tau = v.times[i];
    const ComplexField a = as_physical(v.fields[i]);
    const ComplexField b = as_physical(v1.fields[i]);
    auto& h = H[i];
    for (std::size_t x = 0; x < n; ++x) {
      h[x] = (std::norm(a[x]) - 2.0 * M) * a[x] - (std::norm(b[x]) - 2.0 * M) * b[x];
      if (h[x] != cplx{}) all_zero = false;
    }
    fft::forward(h.data(), h.data(), n);
    for (std::size_t k = 0; k < n; ++k) h[k] *= 0.5 * sigma * fscale[k] * std::polar(1.0, tau * xi[k] * xi[k]);
  }
  IResult out;
  out.refinement_gap.assign(N, std::numeric_limits<double>::quiet_NaN());
  if (all_zero) {
    out.values.assign(N, ComplexField(g, Representation::physical));
    std::fill(out.refinement_gap.begin(), out.refinement_gap.end(), 0.0);
    return out;
  }
  auto to_field = [&](const std::vector<cplx>& cum, double t) {
    ComplexField F(g, Representation::frequency);
    for (std::size_t k = 0; k < n; ++k) F[k] = -kI * std::polar(1.0, -t * xi[k] * xi[k]) * cum[k];
    return from_fourier(F);
  };
  std::vector<double> s(N);
  for (std::size_t i = 0; i < N; ++i) s[i] = std::log(v.times[i]);
  // Fine trapezoid, cumulative from the top node.
  std::vector<std::vector<cplx>> fine(N, std::vector<cplx>(n, cplx{}));
  for (std::size_t i = N - 1; i-- > 0;) {
    const double ds = 0.5 * (s[i + 1] - s[i]);
    for (std::size_t k = 0; k < n; ++k) fine[i][k] = fine[i + 1][k] + ds * (H[i][k] + H[i + 1][k]);
  }
  // Coarse trapezoid on every other node counted from the top.
  std::vector<cplx> coarse(n, cplx{});
  out.refinement_gap[N - 1] = 0.0;
  for (std::size_t i = N - 1; i >= 2; i -= 2) {
    const std::size_t lo = i - 2;
    const double ds = 0.5 * (s[i] - s[lo]);
    for (std::size_t k = 0; k < n; ++k) coarse[k] += ds * (H[lo][k] + H[i][k]);
    std::vector<cplx> diff(n);
    for (std::size_t k = 0; k < n; ++k) diff[k] = fine[lo][k] - coarse[k];
    out.refinement_gap[lo] = coeff_norm(diff, g.length());
    if (lo < 2) break;
  }
  for (std::size_t i = 0; i < N; ++i) out.values.push_back(to_field(fine[i], v.times[i]));
  return out;
}

double s_norm(const FieldFamily& f, const SNormWeights& w) {
  if (f.size() == 0) throw ConfigError("s_norm of an empty family");
  double total = 0.0;
  for (int k = 0; k <= w.s; ++k) {
    double sup = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      sup = std::max(sup, std::pow(f.times[i], w.mu) * derivative_norm(f.fields[i], k));
    }
    total += sup;
  }
  return total;
}

FieldFamily phi_apply(const FieldFamily& v, const FieldFamily& v1, const std::vector<ComplexField>& source_sum,
                      double M, int sigma, IResult* i_out) {
  if (source_sum.size() != v.size()) throw ConfigError("phi_apply: source terms do not match the family");
  IResult I = functional_I(v, v1, M, sigma);
  FieldFamily out;
  out.times = v.times;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.fields.push_back(as_physical(v1.fields[i]) + I.values[i] + as_physical(source_sum[i]));
  }
  if (i_out) *i_out = std::move(I);
  return out;
}

PicardResult picard_solve(const PicardProblem& pb, const PicardOptions& opts) {
  if (pb.times.size() < 2) throw ConfigError("picard needs a lattice with at least two times");
  if (!(opts.weights.mu > 0.0 && opts.weights.mu < 0.5)) throw ConfigError("picard.mu must lie in (0, 1/2)");
  if (opts.weights.s < 0) throw ConfigError("picard.s must be >= 0");
  const double M = pb.train.mass();
  const int sigma = pb.train.sign;
  PicardResult res;
  res.v1 = sample_v1_family(pb.train, pb.profile, pb.times, pb.grid);
  for (const auto& f : res.v1.fields) require_boundary_mass(f, "picard (v1 family)");

  SourceSpec spec{pb.train, pb.profile, pb.times.back(), pb.panels_per_decade, nullptr};
  std::vector<SourceTag> tags{SourceTag::Ja, SourceTag::Jc, SourceTag::Jd, SourceTag::Je};
  if (opts.include_train_remainder) tags.push_back(SourceTag::Jn);
  res.sources = opts.check_sources ? compute_source_terms_checked(spec, pb.times, pb.grid, tags)
                                   : compute_source_terms(spec, pb.times, pb.grid, tags);
  std::vector<ComplexField> source_sum(pb.times.size(), ComplexField(pb.grid, Representation::physical));
  double tail = 0.0;
  for (const auto& [tag, series] : res.sources.terms) {
    for (std::size_t i = 0; i < series.size(); ++i) source_sum[i] += series[i];
    tail += res.sources.tail_estimate.at(tag);
  }

  FieldFamily v = res.v1;
  double prev = std::numeric_limits<double>::quiet_NaN();
  int growth = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    IResult I;
    FieldFamily next = phi_apply(v, res.v1, source_sum, M, sigma, &I);
    double worst_gap = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (std::isnan(I.refinement_gap[i])) continue;
      const double dev = l2_norm(next.fields[i] - res.v1.fields[i]);
      if (dev > 0.0) worst_gap = std::max(worst_gap, I.refinement_gap[i] / dev);
    }
    if (worst_gap > opts.i_refine_tol) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "snapshot lattice too coarse for I(v): trapezoid refinement gap %.3e of the deviation "
                    "(limit %.2e); lower times.rho",
                    worst_gap, opts.i_refine_tol);
      throw QuadratureError(buf);
    }
    for (const auto& f : next.fields) {
      if (!f.all_finite()) throw NumericalError("picard iterate contains NaN/Inf");
    }
    const double update = s_norm(difference(next, v), opts.weights);
    const double dist = s_norm(difference(next, res.v1), opts.weights);
    const double ratio = it == 1 ? std::numeric_limits<double>::quiet_NaN() : (prev > 0.0 ? update / prev : 0.0);
    res.iterations.push_back({it, update, ratio, tail, dist, worst_gap});
    v = std::move(next);
    if (update < opts.tol) {
      res.converged = true;
      break;
    }
    growth = (it > 1 && update > prev) ? growth + 1 : 0;
    if (growth >= 3) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "picard iteration diverges: update grew 3 times in a row (last %.3e)", update);
      throw NumericalError(buf);
    }
    prev = update;
  }
  res.v = std::move(v);
  return res;
}

}  // namespace nlslab
