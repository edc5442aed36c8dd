#include "ibt/icf.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>

#include "ibt/error.hpp"

namespace ibt {

CutFunction::CutFunction(std::string family, ContactData contact, CutRules rules)
    : family_(std::move(family)), contact_(contact) {
  for (double v : {contact.alpha0, contact.alpha1, contact.c0, contact.c1}) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw InvalidParameter("cut function: contact data must be finite and positive");
    }
  }
  if (!rules.phi || !rules.dphi) {
    throw InvalidParameter("cut function: phi and dphi rules are required");
  }
  if (!rules.one_minus_phi) {
    rules.one_minus_phi = [p = rules.phi](double x) { return 1.0 - p(x); };
  }
  if (!rules.phi_reflected) {
    rules.phi_reflected = [p = rules.phi](double s) { return p(1.0 - s); };
  }
  rules_ = std::make_shared<const CutRules>(std::move(rules));
}

double CutFunction::phi(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("phi: x outside [0,1]");
  if (x == 0.0) return 1.0;
  if (x == 1.0) return 0.0;
  return rules_->phi(x);
}

double CutFunction::dphi(double x) const {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("dphi: x outside (0,1)");
  return rules_->dphi(x);
}

double CutFunction::one_minus_phi(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("one_minus_phi: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return rules_->one_minus_phi(x);
}

double CutFunction::phi_reflected(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("phi_reflected: s outside [0,1]");
  if (s == 0.0) return 0.0;
  if (s == 1.0) return 1.0;
  return rules_->phi_reflected(s);
}

CutFunction make_beta_icf(double alpha0, double alpha1) {
  if (!std::isfinite(alpha0) || !std::isfinite(alpha1) || alpha0 <= 0.0 ||
      alpha1 <= 0.0) {
    throw InvalidParameter("make_beta_icf: exponents must be finite and positive");
  }
  const double beta = boost::math::beta(alpha0, alpha1);
  ContactData contact{alpha0, alpha1, 1.0 / (alpha0 * beta), 1.0 / (alpha1 * beta)};
  CutRules rules;
  rules.phi = [=](double x) { return boost::math::ibetac(alpha0, alpha1, x); };
  rules.dphi = [=](double x) {
    return -boost::math::ibeta_derivative(alpha0, alpha1, x);
  };
  rules.one_minus_phi = [=](double x) { return boost::math::ibeta(alpha0, alpha1, x); };
  rules.phi_reflected = [=](double s) { return boost::math::ibeta(alpha1, alpha0, s); };
  return CutFunction("beta", contact, std::move(rules));
}

double eval_phi(const CutFunction& cf, double x) { return cf.phi(x); }

ContactReport verify_contact(const CutFunction& cf, double probe) {
  if (!(probe > 0.0 && probe <= 1e-3)) {
    throw InvalidParameter("verify_contact: probe must lie in (0, 1e-3]");
  }
  ContactReport r;
  r.probe = probe;
  r.c0_est = cf.one_minus_phi(probe) / std::pow(probe, cf.alpha0());
  r.c1_est = cf.phi_reflected(probe) / std::pow(probe, cf.alpha1());
  r.rel_err0 = std::fabs(r.c0_est - cf.c0()) / cf.c0();
  r.rel_err1 = std::fabs(r.c1_est - cf.c1()) / cf.c1();
  return r;
}

}  // namespace ibt
