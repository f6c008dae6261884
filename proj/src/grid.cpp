#include "subdiff/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "subdiff/errors.hpp"
#include "subdiff/math_util.hpp"
#include "subdiff/parallel.hpp"

namespace subdiff {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  if (n == 1) return {0.5 * (lo + hi)};  // point-mass axis
  if (n < 1 || !(hi > lo)) throw usage_error("grid axis needs n >= 1 and hi > lo");
  std::vector<double> out(n);
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[i] = lo + i * step;
  return out;
}

std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> w(n);
  if (n == 1) {
    w[0] = 1.0;  // point mass
    return w;
  }
  w[0] = 0.5 * (x[1] - x[0]);
  w[n - 1] = 0.5 * (x[n - 1] - x[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (x[i + 1] - x[i - 1]);
  return w;
}

}  // namespace

ThetaGrid ThetaGrid::build(Family family, int n_modes, const GridSpec& spec,
                           double dt, int nlags, int threads) {
  ThetaGrid g;
  g.family_ = family;
  g.n_modes_ = n_modes;
  g.dt_ = dt;
  g.nlags_ = nlags;
  g.spec_ = spec;

  if (family == Family::fbm) {
    const auto h = linspace(spec.h_min, spec.h_max, spec.h_nodes);
    const auto w = trapezoid_weights(h);
    const std::size_t n = h.size();
    g.th1_ = h;
    g.th2_.assign(n, 0.0);
    g.quad_w_ = w;
    g.acf_.resize(n);
    parallel_for(n, threads, [&](std::size_t i) {
      g.acf_[i] = fbm_acf(FbmParams{h[i]}, dt, nlags);
    });
    return g;
  }

  const auto alpha = linspace(spec.alpha_min, spec.alpha_max, spec.alpha_nodes);
  const auto logtau = linspace(spec.logtau_min, spec.logtau_max, spec.logtau_nodes);
  const auto wa = trapezoid_weights(alpha);
  const auto wl = trapezoid_weights(logtau);
  const std::size_t n = alpha.size() * logtau.size();
  g.th1_.resize(n);
  g.th2_.resize(n);
  g.quad_w_.resize(n);
  g.acf_.resize(n);
  // one decomposition per alpha at tau = 1, rescaled along the log tau axis
  parallel_for(alpha.size(), threads, [&](std::size_t i) {
    const GleDecomposition unit =
        gle_decompose(GleParams{1.0 / alpha[i], 1.0, n_modes});
    for (std::size_t j = 0; j < logtau.size(); ++j) {
      const std::size_t k = i * logtau.size() + j;
      g.th1_[k] = alpha[i];
      g.th2_[k] = logtau[j];
      g.quad_w_[k] = wa[i] * wl[j];
      g.acf_[k] = gle_acf(unit.rescaled(std::exp(logtau[j])), dt, nlags);
    }
  });
  return g;
}

PosteriorGrid grid_posterior(const IncrementMatrix& x, const ThetaGrid& grid,
                             const PriorSpec& prior, int threads) {
  if (prior.kind() == PriorSpec::Kind::tabulated &&
      prior.tabulated_size() != grid.size())
    throw usage_error("tabulated prior does not match this grid");

  PosteriorGrid out;
  out.family = grid.family();
  out.n_modes = grid.n_modes();
  out.dt = grid.dt();
  out.n_obs = x.n();
  out.proper_prior = prior.proper();
  out.relative_evidence = !prior.proper();
  out.nodes.resize(grid.size());
  out.quad_w.resize(grid.size());

  parallel_for(grid.size(), threads, [&](std::size_t i) {
    PosteriorNode& node = out.nodes[i];
    node.th1 = grid.th1(i);
    node.th2 = grid.th2(i);
    out.quad_w[i] = grid.quad_weight(i);
    const double lp = prior.log_vartheta_density(
        grid.family(), node.th1, node.th2, static_cast<std::ptrdiff_t>(i));
    const MniwParams node_prior = prior.mniw_at(
        grid.family(), node.th1, node.th2, static_cast<std::ptrdiff_t>(i));
    const auto up = mniw_update(x, grid.acf(i), node_prior);
    node.logw = lp + up.log_evidence;
    node.cond = up.posterior;
  });

  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& node : out.nodes) mx = std::max(mx, node.logw);
  if (!std::isfinite(mx))
    throw numeric_error("grid posterior underflowed at every node (grid far from the mass?)");
  out.norm_w.resize(grid.size());
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.norm_w[i] = out.quad_w[i] * std::exp(out.nodes[i].logw - mx);
    total += out.norm_w[i];
  }
  for (auto& w : out.norm_w) w /= total;
  return out;
}

double PosteriorGrid::log_marginal() const {
  if (!proper_prior)
    throw usage_error("marginal likelihood undefined under an improper prior");
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& node : nodes) mx = std::max(mx, node.logw);
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    s += quad_w[i] * std::exp(nodes[i].logw - mx);
  return mx + std::log(s);
}

double PosteriorGrid::weighted_mean(const std::vector<double>& values) const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += norm_w[i] * values[i];
  return m;
}

double PosteriorGrid::weighted_quantile(const std::vector<double>& values, double p) const {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double acc = 0.0;
  for (const std::size_t i : idx) {
    acc += norm_w[i];
    if (acc >= p) return values[i];
  }
  return values[idx.back()];
}

std::vector<double> PosteriorGrid::node_alpha() const {
  std::vector<double> a(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    a[i] = family == Family::fbm ? 2.0 * nodes[i].th1 : nodes[i].th1;
  return a;
}

std::vector<double> PosteriorGrid::node_logtau() const {
  if (family != Family::gle) throw usage_error("log tau is a GLE quantity");
  std::vector<double> t(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) t[i] = nodes[i].th2;
  return t;
}

std::vector<PosteriorDraw> sample_posterior(const PosteriorGrid& g, int m, SplitRng rng) {
  std::vector<PosteriorDraw> draws;
  draws.reserve(m);
  // cumulative table for O(log n) node picks
  std::vector<double> cum(g.norm_w.size());
  std::partial_sum(g.norm_w.begin(), g.norm_w.end(), cum.begin());
  for (int k = 0; k < m; ++k) {
    const double u = rng.uniform() * cum.back();
    const std::size_t i = static_cast<std::size_t>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    const PosteriorNode& node = g.nodes[std::min(i, g.nodes.size() - 1)];
    PosteriorDraw d;
    d.node = std::min(i, g.nodes.size() - 1);
    d.params.vartheta = g.family == Family::fbm
                            ? SubdiffParams::fbm(node.th1)
                            : SubdiffParams::gle(1.0 / node.th1,
                                                 std::exp(node.th2), g.n_modes);
    d.params.ls = sample_mniw(node.cond, rng);
    draws.push_back(std::move(d));
  }
  return draws;
}

}  // namespace subdiff
