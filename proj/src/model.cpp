#include "qpbound/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qpbound/piecewise.hpp"

namespace qpbound {

std::string step_name(Step u) {
  if (u == kE1) return "e1";
  if (u == kE2) return "e2";
  if (u == -kE1) return "-e1";
  if (u == -kE2) return "-e2";
  if (u == kD1) return "d1";
  if (u == -kD1) return "-d1";
  if (u == kD2) return "d2";
  if (u == -kD2) return "-d2";
  return "0";
}

int component_of(Point n) {
  if (n.n1 < 0 || n.n2 < 0)
    throw Error("component_of: state (" + std::to_string(n.n1) + "," +
                std::to_string(n.n2) + ") is outside the quarter-plane");
  if (n.n1 == 0 && n.n2 == 0) return 3;
  if (n.n2 == 0) return 1;
  if (n.n1 == 0) return 2;
  return 4;
}

bool step_in_neighborhood(int k, Step u) {
  switch (k) {
    case 1: return u.u2 >= 0;                 // N1 = {-1,0,1} x {0,1}
    case 2: return u.u1 >= 0;                 // N2 = {0,1} x {-1,0,1}
    case 3: return u.u1 >= 0 && u.u2 >= 0;    // N3 = {0,1} x {0,1}
    case 4: return true;                      // N4 = all nine
    default:
      throw Error("component index out of range: " + std::to_string(k));
  }
}

const std::vector<Step>& neighborhood(int k) {
  static const std::array<std::vector<Step>, 4> tables = [] {
    std::array<std::vector<Step>, 4> t;
    for (int k = 1; k <= 4; ++k)
      for (Step u : kAllSteps)
        if (step_in_neighborhood(k, u)) t[k - 1].push_back(u);
    return t;
  }();
  if (k < 1 || k > 4)
    throw Error("component index out of range: " + std::to_string(k));
  return tables[k - 1];
}

int RandomWalkSpec::check_k(int k) {
  if (k < 1 || k > 4)
    throw Error("component index out of range: " + std::to_string(k));
  return k - 1;
}

double RandomWalkSpec::row_sum(int k) const {
  double s = 0;
  for (Step u : neighborhood(k)) s += p(k, u);
  return s;
}

std::string ValidationIssue::describe() const {
  std::ostringstream os;
  os << kind << " k=" << k;
  if (kind != "row-sum") os << " u=" << step_name(u);
  os << " (value " << value << ")";
  return os.str();
}

std::string ValidationReport::describe() const {
  std::string s;
  for (const auto& i : issues) {
    if (!s.empty()) s += "; ";
    s += i.describe();
  }
  return s.empty() ? "ok" : s;
}

ValidationReport validate_walk(const RandomWalkSpec& w, double tol) {
  ValidationReport rep;
  for (int k = 1; k <= 4; ++k) {
    for (Step u : kAllSteps) {
      double v = w.p(k, u);
      if (!step_in_neighborhood(k, u)) {
        if (v != 0.0) rep.issues.push_back({"support", k, u, v});
        continue;
      }
      if (v < 0 || !std::isfinite(v)) rep.issues.push_back({"negative", k, u, v});
    }
    double s = w.row_sum(k);
    if (std::abs(s - 1.0) > tol) rep.issues.push_back({"row-sum", k, {}, s});
  }
  return rep;
}

RandomWalkSpec joint_departures(double lambda1, double lambda2, double mu,
                                double mu1, double mu2) {
  if (std::abs(lambda1 + lambda2 + mu - 1.0) > 1e-12)
    throw Error("joint_departures: lambda1 + lambda2 + mu must equal 1");
  if (lambda1 < 0 || lambda2 < 0)
    throw Error("joint_departures: arrival rates must be nonnegative");
  if (mu1 <= 0 || mu2 <= 0 || mu1 > mu || mu2 > mu)
    throw Error("joint_departures: need 0 < mu_i <= mu");
  RandomWalkSpec w;
  for (int k = 1; k <= 4; ++k) {
    w.set_p(k, kE1, lambda1);
    w.set_p(k, kE2, lambda2);
  }
  w.set_p(1, -kE1, mu1);
  w.set_p(1, kZero, mu - mu1);
  w.set_p(2, -kE2, mu2);
  w.set_p(2, kZero, mu - mu2);
  w.set_p(3, kZero, mu);
  w.set_p(4, -kD1, mu);
  return w;
}

RandomWalkSpec coupled_processors(double lambda1, double lambda2, double mu1,
                                  double mu2, double mu_h, double mu_v) {
  if (std::abs(lambda1 + lambda2 + mu1 + mu2 - 1.0) > 1e-12)
    throw Error("coupled_processors: lambda1 + lambda2 + mu1 + mu2 must equal 1");
  if (mu_h <= 0 || mu_v <= 0)
    throw Error("coupled_processors: need mu_h > 0 and mu_v > 0");
  double loop_h = mu1 + mu2 - mu_h;
  double loop_v = mu1 + mu2 - mu_v;
  if (lambda1 < 0 || lambda2 < 0 || mu1 < 0 || mu2 < 0 || loop_h < 0 || loop_v < 0)
    throw Error("coupled_processors: a transition probability falls outside [0,1]");
  RandomWalkSpec w;
  for (int k = 1; k <= 4; ++k) {
    w.set_p(k, kE1, lambda1);
    w.set_p(k, kE2, lambda2);
  }
  w.set_p(1, -kE1, mu_h);
  w.set_p(1, kZero, loop_h);
  w.set_p(2, -kE2, mu_v);
  w.set_p(2, kZero, loop_v);
  w.set_p(3, kZero, mu1 + mu2);
  w.set_p(4, -kE1, mu1);
  w.set_p(4, -kE2, mu2);
  return w;
}

GeometricProductForm::GeometricProductForm(double r1_, double r2_)
    : r1(r1_), r2(r2_) {
  if (!(r1 > 0 && r1 < 1 && r2 > 0 && r2 < 1))
    throw Error("GeometricProductForm: (r1, r2) must lie strictly inside (0,1)^2");
}

double GeometricProductForm::pi(Point n) const {
  return (1 - r1) * std::pow(r1, double(n.n1)) * (1 - r2) *
         std::pow(r2, double(n.n2));
}

PerturbationPair::PerturbationPair(RandomWalkSpec orig, RandomWalkSpec pert)
    : original(std::move(orig)), perturbed(std::move(pert)) {
  for (int k = 1; k <= 4; ++k) {
    double qsum = 0;
    for (Step u : neighborhood(k)) qsum += q(k, u);
    if (std::abs(qsum) > 1e-12)
      throw Error("PerturbationPair: perturbation mass does not cancel on k=" +
                  std::to_string(k));
  }
}

namespace {

// 1 - sum_{u in N_k(n)} p_{k(n+u),-u} r1^{u1} r2^{u2}, the balance residual
// at n divided by pi(n).
double balance_residual(const RandomWalkSpec& w, Point n, double r1, double r2) {
  double acc = 1.0;
  for (Step u : neighborhood(component_of(n))) {
    int k_src = component_of(n + u);
    double coeff = std::pow(r1, double(u.u1)) * std::pow(r2, double(u.u2));
    acc -= w.p(k_src, -u) * coeff;
  }
  return acc;
}

void balance_residual_grad(const RandomWalkSpec& w, Point n, double r1,
                           double r2, double* d1, double* d2) {
  *d1 = 0;
  *d2 = 0;
  for (Step u : neighborhood(component_of(n))) {
    int k_src = component_of(n + u);
    double p = w.p(k_src, -u);
    if (p == 0) continue;
    double f1 = std::pow(r1, double(u.u1));
    double f2 = std::pow(r2, double(u.u2));
    *d1 -= p * u.u1 * std::pow(r1, double(u.u1 - 1)) * f2;
    *d2 -= p * f1 * u.u2 * std::pow(r2, double(u.u2 - 1));
  }
}

}  // namespace

StationarityCheck verify_geometric_stationarity(const RandomWalkSpec& w,
                                                const GeometricProductForm& r,
                                                double tol) {
  StationarityCheck out;
  for (int t = 1; t <= 9; ++t) {
    double res = balance_residual(w, t_representative(t), r.r1, r.r2);
    out.residuals[t - 1] = res;
    out.max_residual = std::max(out.max_residual, std::abs(res));
  }
  out.ok = out.max_residual <= tol;
  return out;
}

GeometricProductForm solve_rate_pair(const RandomWalkSpec& w,
                                     double verify_tol) {
  // Newton on the interior (T9) and horizontal-axis (T3) residuals; the
  // remaining representatives are checked afterwards.
  const Point interior = t_representative(9);
  const Point axis = t_representative(3);
  std::vector<GeometricProductForm> roots;
  auto already_known = [&](double r1, double r2) {
    for (const auto& g : roots)
      if (std::abs(g.r1 - r1) < 1e-8 && std::abs(g.r2 - r2) < 1e-8) return true;
    return false;
  };

  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      double r1 = 0.1 + 0.2 * a;
      double r2 = 0.1 + 0.2 * b;
      double g1 = balance_residual(w, interior, r1, r2);
      double g2 = balance_residual(w, axis, r1, r2);
      double norm = std::max(std::abs(g1), std::abs(g2));
      bool converged = false;
      for (int it = 0; it < 200; ++it) {
        if (norm < 1e-13) {
          converged = true;
          break;
        }
        double j11, j12, j21, j22;
        balance_residual_grad(w, interior, r1, r2, &j11, &j12);
        balance_residual_grad(w, axis, r1, r2, &j21, &j22);
        double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-300) break;
        double s1 = (g1 * j22 - g2 * j12) / det;
        double s2 = (j11 * g2 - j21 * g1) / det;
        // Halve the step while it leaves (0,1)^2 or increases the residual.
        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h < 40; ++h) {
          double n1 = r1 - step * s1;
          double n2 = r2 - step * s2;
          if (n1 > 1e-9 && n1 < 1 - 1e-9 && n2 > 1e-9 && n2 < 1 - 1e-9) {
            double t1 = balance_residual(w, interior, n1, n2);
            double t2 = balance_residual(w, axis, n1, n2);
            double tn = std::max(std::abs(t1), std::abs(t2));
            if (tn < norm || tn < 1e-13) {
              r1 = n1;
              r2 = n2;
              g1 = t1;
              g2 = t2;
              norm = tn;
              accepted = true;
              break;
            }
          }
          step *= 0.5;
        }
        if (!accepted) break;
      }
      if (!converged || already_known(r1, r2)) continue;
      GeometricProductForm cand(r1, r2);
      if (verify_geometric_stationarity(w, cand, verify_tol).ok)
        roots.push_back(cand);
    }
  }

  if (roots.empty())
    throw NoProductForm(
        "solve_rate_pair: no verified geometric product form in (0,1)^2");
  if (roots.size() > 1) {
    std::ostringstream os;
    os << "solve_rate_pair: multiple verified product forms:";
    for (const auto& g : roots) os << " (" << g.r1 << "," << g.r2 << ")";
    throw MultipleProductForms(os.str(), roots);
  }
  return roots.front();
}

RandomWalkSpec random_valid_walk(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RandomWalkSpec w;
  for (int k = 1; k <= 4; ++k) {
    const auto& nk = neighborhood(k);
    std::vector<double> mass(nk.size());
    double total = 0;
    for (auto& m : mass) {
      m = unif(rng);
      total += m;
    }
    double acc = 0;
    for (size_t i = 0; i + 1 < nk.size(); ++i) {
      double v = mass[i] / total;
      w.set_p(k, nk[i], v);
      acc += v;
    }
    // Assign the remainder to the last direction so the row sums to 1
    // exactly as stored.
    w.set_p(k, nk.back(), 1.0 - acc);
  }
  return w;
}

}  // namespace qpbound
