#ifndef HOMFE_MATERIAL_HPP
#define HOMFE_MATERIAL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "homfe/common.hpp"
#include "homfe/fields.hpp"
#include "homfe/grid.hpp"
#include "homfe/mandel.hpp"

namespace homfe {

/**
 * Point-wise constitutive model. `evaluate` maps a strain (or temperature
 * gradient) plus the committed internal variables to stress (or flux), the
 * consistent tangent, and the trial internal variables. It is a pure
 * function of its inputs and safe to call concurrently.
 *
 * Supported models:
 *  - linear elasticity with a full Mandel stiffness matrix,
 *  - linear conduction with a d x d conductivity matrix,
 *  - small-strain J2 plasticity with isotropic linear hardening
 *    tau_y = tau_y0 + H eps_p, integrated by radial return. In 2d the
 *    model runs in plane strain through its 3d form.
 */
class MaterialModel {
 public:
  enum class Kind { LinearElastic, Conductivity, J2Plastic };

  /// Full stiffness matrix; must be symmetric (a non-symmetric tangent is
  /// rejected, not symmetrized) and positive definite.
  static MaterialModel linear_elastic(const Eigen::MatrixXd& c);
  static MaterialModel isotropic_elastic(double bulk_modulus,
                                         double shear_modulus, int d);
  static MaterialModel conductivity(const Eigen::MatrixXd& a);
  static MaterialModel isotropic_conductivity(double kappa, int d);
  static MaterialModel j2_plastic(double bulk_modulus, double shear_modulus,
                                  double yield_stress, double hardening,
                                  int d);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool thermal() const { return kind_ == Kind::Conductivity; }
  bool nonlinear() const { return kind_ == Kind::J2Plastic; }
  /// Length of the strain/stress (or gradient/flux) vectors.
  int flux_components() const;
  /// Number of internal variables per quadrature point.
  int internal_width() const;

  /// Tangent of the linear models (throws for J2).
  const Eigen::MatrixXd& linear_tangent() const;

  /// Evaluate stress, consistent tangent and trial internal variables.
  /// `tangent` (column-major flux_components^2) and `g_new` may be null to
  /// skip the respective output. Throws NumericalError on non-finite input.
  void evaluate(const double* eps, const double* g, double* sigma,
                double* tangent, double* g_new) const;

  /// Convenience wrapper used by tests and bindings.
  void evaluate(const Eigen::VectorXd& eps, const Eigen::VectorXd& g,
                Eigen::VectorXd& sigma, Eigen::MatrixXd& tangent,
                Eigen::VectorXd& g_new) const;

  double bulk_modulus() const { return k_; }
  double shear_modulus() const { return g_mod_; }
  double yield_stress() const { return tau_y0_; }
  double hardening() const { return hard_; }

 private:
  MaterialModel() = default;

  Kind kind_ = Kind::LinearElastic;
  int dim_ = 0;
  Eigen::MatrixXd tangent_;             // linear models
  double k_ = 0.0, g_mod_ = 0.0;        // J2 elastic moduli
  double tau_y0_ = 0.0, hard_ = 0.0;    // J2 yield and hardening
  Eigen::MatrixXd c_elastic3_;          // J2: 3d elastic stiffness
};

/// Per-quadrature-point internal variable storage, point-major.
struct InternalState {
  int width = 0;
  Index quads = 0;
  Eigen::VectorXd data;

  InternalState() = default;
  InternalState(int width_, Index quads_)
      : width(width_), quads(quads_),
        data(Eigen::VectorXd::Zero(width_ * quads_)) {}

  double* at(Index q) { return width ? data.data() + q * width : nullptr; }
  const double* at(Index q) const {
    return width ? data.data() + q * width : nullptr;
  }
};

/// Pixel-resolved material assignment: a phase id per pixel plus a catalog.
struct MaterialMap {
  std::vector<MaterialModel> catalog;
  std::vector<std::uint8_t> phase;

  const MaterialModel& at_pixel(Index p) const {
    return catalog[phase[static_cast<std::size_t>(p)]];
  }
  bool uniform() const;
  /// Validates coverage and that all models share physics and dimension.
  void validate(const GridLayout& layout) const;
  int internal_width() const;
  int flux_components() const { return catalog.front().flux_components(); }
  int node_components(int d) const {
    return catalog.front().thermal() ? 1 : d;
  }
  InternalState make_state(const GridLayout& layout) const {
    return InternalState(internal_width(), layout.num_quads());
  }
};

}  // namespace homfe

#endif
