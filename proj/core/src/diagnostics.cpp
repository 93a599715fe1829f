#include "homog/diagnostics.hpp"

#include <cmath>
#include <numbers>

namespace homog {

namespace {

std::vector<std::size_t> ball_nodes(const DomainMesh& mesh, const Vec& center, double r) {
  for (int a = 0; a < mesh.dim(); ++a)
    if (center[a] - r < -1e-12 || center[a] + r > 1.0 + 1e-12) throw PreconditionError("ball leaves the domain");
  std::vector<std::size_t> nodes;
  const Vec c{center[0], mesh.dim() == 2 ? center[1] : 0.0};
  for (std::size_t k = 0; k < mesh.size(); ++k)
    if (norm(mesh.point(k) - c) <= r + 1e-12) nodes.push_back(k);
  if (nodes.empty()) throw PreconditionError("ball contains no nodes");
  return nodes;
}

double grad_mag(const Solution& s, std::size_t k) { return norm(s.grad_u.vec(k)); }

template <class Fn>
double ball_mean(const std::vector<std::size_t>& nodes, Fn&& fn) {
  double sum = 0.0;
  for (std::size_t k : nodes) sum += fn(k);
  return sum / static_cast<double>(nodes.size());
}

BallRatio make_ratio(const Ball& b, double num, double den) {
  BallRatio r{b, 0.0, false};
  if (den > 0.0) {
    r.ratio = num / den;
  } else {
    r.degenerate = true;
  }
  return r;
}

}  // namespace

std::vector<BallRatio> caccioppoli_check(const Solution& s, const std::vector<Ball>& balls, double p) {
  const DomainMesh& mesh = s.u.mesh();
  std::vector<BallRatio> out;
  for (const Ball& b : balls) {
    const auto inner = ball_nodes(mesh, b.center, b.r);
    const auto outer = ball_nodes(mesh, b.center, 2.0 * b.r);
    const double g = std::pow(ball_mean(inner, [&](std::size_t k) { return std::pow(grad_mag(s, k), p); }), 1.0 / p);
    const double c = ball_mean(outer, [&](std::size_t k) { return s.u(0, k); });
    const double d =
        std::pow(ball_mean(outer, [&](std::size_t k) { return std::pow(std::abs(s.u(0, k) - c), p); }), 1.0 / p);
    out.push_back(make_ratio(b, b.r * g, d));
  }
  return out;
}

std::vector<BallRatio> meyers_check(const Solution& s, const std::vector<Ball>& balls, double p, double delta) {
  const DomainMesh& mesh = s.u.mesh();
  const double q = p * (1.0 + delta);
  std::vector<BallRatio> out;
  for (const Ball& b : balls) {
    const auto inner = ball_nodes(mesh, b.center, b.r);
    const auto outer = ball_nodes(mesh, b.center, 2.0 * b.r);
    const double num = std::pow(ball_mean(inner, [&](std::size_t k) { return std::pow(grad_mag(s, k), q); }), 1.0 / q);
    const double den = std::pow(ball_mean(outer, [&](std::size_t k) { return std::pow(grad_mag(s, k), p); }), 1.0 / p);
    out.push_back(make_ratio(b, num, den));
  }
  return out;
}

std::vector<BallRatio> grad_regularity_check(const Solution& u0, const std::vector<Ball>& balls, double p,
                                             double mu_floor) {
  const DomainMesh& mesh = u0.u.mesh();
  std::vector<NodalField> second;
  for (int a = 0; a < mesh.dim(); ++a) {
    NodalField comp(mesh, 1);
    std::copy(u0.grad_u.component(a).begin(), u0.grad_u.component(a).end(), comp.values().begin());
    second.push_back(nodal_gradient(comp));
  }
  auto hess_sq = [&](std::size_t k) {
    double s = 0.0;
    for (const auto& h : second)
      for (int c = 0; c < h.components(); ++c) s += h(c, k) * h(c, k);
    return s;
  };
  std::vector<BallRatio> out;
  for (const Ball& b : balls) {
    const auto inner = ball_nodes(mesh, b.center, b.r);
    const auto outer = ball_nodes(mesh, b.center, 2.0 * b.r);
    const double num = b.r * b.r * ball_mean(inner, [&](std::size_t k) {
      const double g = grad_mag(u0, k);
      return hess_sq(k) * std::pow(mu_floor * mu_floor + g * g, 0.5 * (p - 2.0));
    });
    const double den = ball_mean(outer, [&](std::size_t k) { return std::pow(grad_mag(u0, k), p); });
    out.push_back(make_ratio(b, num, den));
  }
  return out;
}

DecayReport large_scale_decay(const Solution& s, const Vec& center, const std::vector<double>& radii, double p) {
  if (radii.size() < 3) throw PreconditionError("decay fit needs at least three radii");
  const DomainMesh& mesh = s.u.mesh();
  DecayReport rep;
  for (double r : radii) {
    if (s.eps > 0.0 && r < s.eps - 1e-12) throw PreconditionError("radius below eps");
    const auto nodes = ball_nodes(mesh, center, r);
    const double volume = mesh.dim() == 2 ? std::numbers::pi * r * r : 2.0 * r;
    rep.radii.push_back(r);
    rep.integrals.push_back(volume * ball_mean(nodes, [&](std::size_t k) { return std::pow(grad_mag(s, k), p); }));
  }
  rep.fit = fit_loglog(rep.radii, rep.integrals, 3);
  return rep;
}

std::vector<double> geometric_radii(double r_max, double r_min, double ratio) {
  if (!(r_max > 0.0 && r_min > 0.0 && ratio > 1.0)) throw PreconditionError("invalid radius range");
  std::vector<double> out;
  for (double r = r_max; r >= r_min * (1.0 - 1e-12); r /= ratio) out.push_back(r);
  return out;
}

}  // namespace homog
