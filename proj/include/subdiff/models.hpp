#ifndef SUBDIFF_MODELS_HPP
#define SUBDIFF_MODELS_HPP

#include <string>

#include "subdiff/acf.hpp"
#include "subdiff/gausslik.hpp"

namespace subdiff {

enum class Family { fbm, gle };

/// Subdiffusion parameters vartheta: H for fBM, (gamma, tau) for GLE-K.
struct SubdiffParams {
  Family family = Family::fbm;
  double hurst = 0.5;   // fBM
  double gamma = 2.0;   // GLE
  double tau = 1e-3;    // GLE
  int n_modes = 2;      // GLE

  static SubdiffParams fbm(double hurst);
  static SubdiffParams gle(double gamma, double tau, int n_modes);
  double alpha() const;  // subdiffusion coefficient: 2H or 1/gamma
};

/// Full model parameter theta = (vartheta, mu, Sigma).
struct ModelParams {
  SubdiffParams vartheta;
  LocationScale ls;
};

AcfVector model_acf(const SubdiffParams& p, double dt, int nlags);
double model_msd(const SubdiffParams& p, double t);

std::string family_name(Family f);
std::string model_label(Family f, int n_modes);  // "fbm", "gle-200"

}  // namespace subdiff

#endif  // SUBDIFF_MODELS_HPP
