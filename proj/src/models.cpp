#include "subdiff/models.hpp"

namespace subdiff {

SubdiffParams SubdiffParams::fbm(double hurst) {
  SubdiffParams p;
  p.family = Family::fbm;
  p.hurst = hurst;
  return p;
}

SubdiffParams SubdiffParams::gle(double gamma, double tau, int n_modes) {
  SubdiffParams p;
  p.family = Family::gle;
  p.gamma = gamma;
  p.tau = tau;
  p.n_modes = n_modes;
  return p;
}

double SubdiffParams::alpha() const {
  return family == Family::fbm ? 2.0 * hurst : 1.0 / gamma;
}

AcfVector model_acf(const SubdiffParams& p, double dt, int nlags) {
  if (p.family == Family::fbm) return fbm_acf(FbmParams{p.hurst}, dt, nlags);
  return gle_acf(gle_decompose(GleParams{p.gamma, p.tau, p.n_modes}), dt, nlags);
}

double model_msd(const SubdiffParams& p, double t) {
  if (p.family == Family::fbm) return fbm_msd(FbmParams{p.hurst}, t);
  return gle_msd(gle_decompose(GleParams{p.gamma, p.tau, p.n_modes}), t);
}

std::string family_name(Family f) { return f == Family::fbm ? "fbm" : "gle"; }

std::string model_label(Family f, int n_modes) {
  if (f == Family::fbm) return "fbm";
  return "gle-" + std::to_string(n_modes);
}

}  // namespace subdiff
