#include "homfe/material.hpp"

#include <cmath>
#include <set>

namespace homfe {

namespace {

const double kSqrt32 = std::sqrt(1.5);

void check_spd(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ValidationError(std::string(what) + ": matrix must be square");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ValidationError(std::string(what) +
                          ": non-symmetric tangent rejected");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw ValidationError(std::string(what) +
                          ": matrix must be positive definite");
  }
}

bool all_finite(const double* x, int n) {
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

}  // namespace

MaterialModel MaterialModel::linear_elastic(const Eigen::MatrixXd& c) {
  int d = 0;
  if (c.rows() == 3) {
    d = 2;
  } else if (c.rows() == 6) {
    d = 3;
  } else {
    throw ValidationError("linear_elastic: stiffness must be 3x3 or 6x6");
  }
  check_spd(c, "linear_elastic");
  MaterialModel m;
  m.kind_ = Kind::LinearElastic;
  m.dim_ = d;
  m.tangent_ = c;
  return m;
}

MaterialModel MaterialModel::isotropic_elastic(double bulk_modulus,
                                               double shear_modulus, int d) {
  return linear_elastic(isotropic_stiffness(bulk_modulus, shear_modulus, d));
}

MaterialModel MaterialModel::conductivity(const Eigen::MatrixXd& a) {
  if (a.rows() != 2 && a.rows() != 3) {
    throw ValidationError("conductivity: matrix must be 2x2 or 3x3");
  }
  check_spd(a, "conductivity");
  MaterialModel m;
  m.kind_ = Kind::Conductivity;
  m.dim_ = static_cast<int>(a.rows());
  m.tangent_ = a;
  return m;
}

MaterialModel MaterialModel::isotropic_conductivity(double kappa, int d) {
  if (!(kappa > 0.0)) {
    throw ValidationError("conductivity: kappa must be > 0");
  }
  return conductivity(kappa * Eigen::MatrixXd::Identity(d, d));
}

MaterialModel MaterialModel::j2_plastic(double bulk_modulus,
                                        double shear_modulus,
                                        double yield_stress, double hardening,
                                        int d) {
  if (!(bulk_modulus > 0.0) || !(shear_modulus > 0.0) ||
      !(yield_stress > 0.0)) {
    throw ValidationError("j2_plastic: K, G and tau_y0 must be > 0");
  }
  if (hardening < 0.0) {
    throw ValidationError("j2_plastic: H must be >= 0");
  }
  if (d != 2 && d != 3) {
    throw ValidationError("j2_plastic: dimension must be 2 or 3");
  }
  MaterialModel m;
  m.kind_ = Kind::J2Plastic;
  m.dim_ = d;
  m.k_ = bulk_modulus;
  m.g_mod_ = shear_modulus;
  m.tau_y0_ = yield_stress;
  m.hard_ = hardening;
  m.c_elastic3_ = isotropic_stiffness(bulk_modulus, shear_modulus, 3);
  return m;
}

int MaterialModel::flux_components() const {
  return thermal() ? dim_ : mandel_dim(dim_);
}

int MaterialModel::internal_width() const {
  // J2 stores the (3d) Mandel plastic strain plus the accumulated
  // equivalent plastic strain.
  return kind_ == Kind::J2Plastic ? 7 : 0;
}

const Eigen::MatrixXd& MaterialModel::linear_tangent() const {
  if (kind_ == Kind::J2Plastic) {
    throw ValidationError("linear_tangent: J2 has no constant tangent");
  }
  return tangent_;
}

namespace {

// Radial-return update in the 3d Mandel representation. eps6 is the total
// strain, g = [plastic strain (6), accumulated plastic strain (1)].
void j2_return(const double k, const double g_mod, const double tau_y0,
               const double hard, const Eigen::Matrix<double, 6, 1>& eps6,
               const double* g, Eigen::Matrix<double, 6, 1>& sigma6,
               Eigen::Matrix<double, 6, 6>* tangent6, double* g_new) {
  using Vec6 = Eigen::Matrix<double, 6, 1>;
  Eigen::Map<const Vec6> ep(g);
  const double ep_acc = g[6];

  const Vec6 ee = eps6 - ep;
  const double tr = ee[0] + ee[1] + ee[2];
  Vec6 dev = ee;
  dev.head<3>().array() -= tr / 3.0;
  const Vec6 s_tr = 2.0 * g_mod * dev;
  sigma6 = s_tr;
  sigma6.head<3>().array() += k * tr;

  const double s_norm = s_tr.norm();
  const double q_tr = kSqrt32 * s_norm;
  const double f = q_tr - (tau_y0 + hard * ep_acc);

  if (f <= 0.0) {  // elastic step
    if (tangent6) {
      *tangent6 = 3.0 * k * volumetric_projector(3) +
                  2.0 * g_mod * deviatoric_projector(3);
    }
    if (g_new) {
      for (int i = 0; i < 7; ++i) g_new[i] = g[i];
    }
    return;
  }

  const double dgamma = f / (3.0 * g_mod + hard);
  const Vec6 n_hat = s_tr / s_norm;
  sigma6 -= 2.0 * g_mod * dgamma * kSqrt32 * n_hat;

  if (g_new) {
    Eigen::Map<Vec6> ep_out(g_new);
    ep_out = ep + dgamma * kSqrt32 * n_hat;
    g_new[6] = ep_acc + dgamma;
  }
  if (tangent6) {
    const double a = 1.0 - 3.0 * g_mod * dgamma / q_tr;
    const double b =
        6.0 * g_mod * g_mod * (1.0 / (3.0 * g_mod + hard) - dgamma / q_tr);
    *tangent6 = 3.0 * k * volumetric_projector(3) +
                2.0 * g_mod * a * deviatoric_projector(3) -
                b * (n_hat * n_hat.transpose());
  }
}

}  // namespace

void MaterialModel::evaluate(const double* eps, const double* g, double* sigma,
                             double* tangent, double* g_new) const {
  const int m = flux_components();
  if (!all_finite(eps, m)) {
    throw NumericalError("evaluate: non-finite strain input");
  }
  switch (kind_) {
    case Kind::LinearElastic:
    case Kind::Conductivity: {
      Eigen::Map<const Eigen::VectorXd> e(eps, m);
      Eigen::Map<Eigen::VectorXd> s(sigma, m);
      s.noalias() = tangent_ * e;
      if (tangent) {
        Eigen::Map<Eigen::MatrixXd>(tangent, m, m) = tangent_;
      }
      return;
    }
    case Kind::J2Plastic: {
      Eigen::Matrix<double, 6, 1> eps6 = Eigen::Matrix<double, 6, 1>::Zero();
      if (dim_ == 3) {
        eps6 = Eigen::Map<const Eigen::Matrix<double, 6, 1>>(eps);
      } else {  // plane strain embedding: (11, 22, 12) -> 3d slots 0, 1, 5
        eps6[0] = eps[0];
        eps6[1] = eps[1];
        eps6[5] = eps[2];
      }
      Eigen::Matrix<double, 6, 1> sigma6;
      Eigen::Matrix<double, 6, 6> tan6;
      j2_return(k_, g_mod_, tau_y0_, hard_, eps6, g, sigma6,
                tangent ? &tan6 : nullptr, g_new);
      if (dim_ == 3) {
        Eigen::Map<Eigen::Matrix<double, 6, 1>> s_out(sigma);
        s_out = sigma6;
        if (tangent) {
          Eigen::Map<Eigen::Matrix<double, 6, 6>> t_out(tangent);
          t_out = tan6;
        }
      } else {
        const int idx[3] = {0, 1, 5};
        for (int a = 0; a < 3; ++a) sigma[a] = sigma6[idx[a]];
        if (tangent) {
          Eigen::Map<Eigen::Matrix<double, 3, 3>> t2(tangent);
          for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) t2(a, b) = tan6(idx[a], idx[b]);
          }
        }
      }
      return;
    }
  }
}

void MaterialModel::evaluate(const Eigen::VectorXd& eps,
                             const Eigen::VectorXd& g, Eigen::VectorXd& sigma,
                             Eigen::MatrixXd& tangent,
                             Eigen::VectorXd& g_new) const {
  const int m = flux_components();
  if (eps.size() != m) {
    throw ValidationError("evaluate: strain has wrong length");
  }
  if (g.size() != internal_width()) {
    throw ValidationError("evaluate: internal-variable width mismatch");
  }
  sigma.resize(m);
  tangent.resize(m, m);
  g_new.resize(internal_width());
  evaluate(eps.data(), g.data(), sigma.data(), tangent.data(),
           internal_width() ? g_new.data() : nullptr);
}

bool MaterialMap::uniform() const {
  if (catalog.size() <= 1) return true;
  const std::set<std::uint8_t> used(phase.begin(), phase.end());
  return used.size() <= 1;
}

void MaterialMap::validate(const GridLayout& layout) const {
  if (catalog.empty()) {
    throw ValidationError("materials: catalog is empty");
  }
  if (static_cast<Index>(phase.size()) != layout.num_pixels()) {
    throw ValidationError("materials: phase map has " +
                          std::to_string(phase.size()) + " entries, expected " +
                          std::to_string(layout.num_pixels()));
  }
  const bool thermal = catalog.front().thermal();
  for (const auto& model : catalog) {
    if (model.thermal() != thermal) {
      throw ValidationError("materials: mixed thermal and mechanical models");
    }
    if (model.dim() != layout.dim()) {
      throw ValidationError("materials: model dimension mismatch");
    }
  }
  for (std::size_t p = 0; p < phase.size(); ++p) {
    if (phase[p] >= catalog.size()) {
      throw ValidationError("materials: phase id " +
                            std::to_string(int(phase[p])) + " at pixel " +
                            std::to_string(p) + " missing from catalog");
    }
  }
}

int MaterialMap::internal_width() const {
  int w = 0;
  for (const auto& model : catalog) w = std::max(w, model.internal_width());
  return w;
}

}  // namespace homfe
