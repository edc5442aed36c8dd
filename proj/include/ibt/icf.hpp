#pragma once

// Intermittent cut functions: strictly decreasing phi on [0,1] with
// phi(0) = 1, phi(1) = 0 and power-law contact at both ends,
//   1 - phi(x)  ~ c0 x^alpha0,   phi(1 - x) ~ c1 x^alpha1   (x -> 0+).

#include <functional>
#include <memory>
#include <string>

namespace ibt {

/// Contact exponents and coefficients of a cut function.
struct ContactData {
  double alpha0 = 1.0;
  double alpha1 = 1.0;
  double c0 = 1.0;
  double c1 = 1.0;
};

/// Evaluation rules of a cut function.  `one_minus_phi` and `phi_reflected`
/// exist so that values close to the indifferent ends keep full relative
/// precision; custom functions may leave them empty.
struct CutRules {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::function<double(double)> one_minus_phi;   // x -> 1 - phi(x)
  std::function<double(double)> phi_reflected;   // s -> phi(1 - s)
};

/// Immutable cut function value; copies share the same rules.
class CutFunction {
 public:
  CutFunction(std::string family, ContactData contact, CutRules rules);

  [[nodiscard]] const ContactData& contact() const noexcept { return contact_; }
  [[nodiscard]] double alpha0() const noexcept { return contact_.alpha0; }
  [[nodiscard]] double alpha1() const noexcept { return contact_.alpha1; }
  [[nodiscard]] double c0() const noexcept { return contact_.c0; }
  [[nodiscard]] double c1() const noexcept { return contact_.c1; }
  [[nodiscard]] const std::string& family() const noexcept { return family_; }

  /// phi(x); endpoints are exact.  Throws DomainError outside [0,1].
  [[nodiscard]] double phi(double x) const;
  /// D phi on (0,1).
  [[nodiscard]] double dphi(double x) const;
  /// 1 - phi(x) with relative accuracy near x = 0.
  [[nodiscard]] double one_minus_phi(double x) const;
  /// phi(1 - s) with relative accuracy near s = 0.
  [[nodiscard]] double phi_reflected(double s) const;

 private:
  std::string family_;
  ContactData contact_;
  std::shared_ptr<const CutRules> rules_;
};

/// phi(x) = 1 - I_x(alpha0, alpha1) with I the regularized incomplete beta.
CutFunction make_beta_icf(double alpha0, double alpha1);

/// Same as CutFunction::phi; kept as a free function for symmetry with the
/// other module entry points.
double eval_phi(const CutFunction& cf, double x);

struct ContactReport {
  double probe = 0.0;
  double c0_est = 0.0;
  double c1_est = 0.0;
  double rel_err0 = 0.0;
  double rel_err1 = 0.0;
};

/// Estimates c0, c1 from phi at x = probe and compares with the declared
/// coefficients.  probe must lie in (0, 1e-3].
ContactReport verify_contact(const CutFunction& cf, double probe);

}  // namespace ibt
