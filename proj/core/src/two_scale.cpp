#include "homog/two_scale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace homog {

namespace {

double alpha_of(double p) { return p <= 2.0 ? 1.0 / (3.0 - p) : 2.0 / p; }
double gamma_of(double p) { return p <= 2.0 ? (p - 1.0) / (3.0 - p) : 2.0 / p; }

int steps_of(const DomainMesh& mesh, double h) {
  const double k = h / mesh.spacing();
  const double r = std::round(k);
  if (!(r >= 1.0) || std::abs(k - r) > 1e-9 * std::max(1.0, k))
    throw PreconditionError("step must be a positive multiple of the mesh spacing");
  return static_cast<int>(r);
}

// Node shifted by k along axis, or npos when it leaves the box.
std::size_t shifted(const DomainMesh& mesh, std::size_t node, int axis, int k) {
  const int i = mesh.axis_index(node, 0);
  const int j = mesh.dim() == 2 ? mesh.axis_index(node, 1) : 0;
  const int ii = axis == 0 ? i + k : i;
  const int jj = axis == 1 ? j + k : j;
  if (ii < 0 || ii > mesh.n() || jj < 0 || jj > mesh.n()) return static_cast<std::size_t>(-1);
  return mesh.index(ii, jj);
}

// x/eps mod 1, exact on compatible meshes.
Vec cell_coordinate(const DomainMesh& mesh, std::size_t node, double eps) {
  const int c = static_cast<int>(std::lround(eps * mesh.n()));
  Vec y{0.0, 0.0};
  for (int a = 0; a < mesh.dim(); ++a) y[a] = static_cast<double>(mesh.axis_index(node, a) % c) / c;
  return y;
}

double node_volume(const DomainMesh& mesh) { return std::pow(mesh.spacing(), mesh.dim()); }

double magnitude(const NodalField& f, std::size_t k) {
  double s = 0.0;
  for (int c = 0; c < f.components(); ++c) s += f(c, k) * f(c, k);
  return std::sqrt(s);
}

NodalField scaled_by(const NodalField& v, const NodalField& s) {
  NodalField out = v;
  for (int c = 0; c < v.components(); ++c)
    for (std::size_t k = 0; k < v.size(); ++k) out(c, k) *= s(0, k);
  return out;
}

}  // namespace

MollifierKernel mollifier_kernel(const DomainMesh& mesh, double eps) {
  const double q = eps / (4.0 * mesh.spacing());
  if (!(q >= 1.0 - 1e-9) || std::abs(q - std::round(q)) > 1e-9 * q)
    throw PreconditionError("mollifier needs eps to be a multiple of 4 mesh spacings");
  MollifierKernel k;
  k.radius = static_cast<int>(std::lround(2.0 * q));  // eps / (2 spacing)
  const double R = k.radius;
  const int jr = mesh.dim() == 2 ? k.radius : 0;
  double total = 0.0;
  for (int b = -jr; b <= jr; ++b) {
    for (int a = -k.radius; a <= k.radius; ++a) {
      const double s2 = (a * a + b * b) / (R * R);
      if (s2 >= 1.0) continue;
      const double w = std::exp(-1.0 / (1.0 - s2));
      k.offsets.push_back({a, b});
      k.weights.push_back(w);
      total += w;
    }
  }
  for (double& w : k.weights) w /= total;
  return k;
}

NodalField mollify(const NodalField& field, double eps) {
  const DomainMesh& mesh = field.mesh();
  const MollifierKernel k = mollifier_kernel(mesh, eps);
  NodalField out(mesh, field.components());
  const int n = mesh.n();
  for (std::size_t node = 0; node < mesh.size(); ++node) {
    const int i = mesh.axis_index(node, 0);
    const int j = mesh.dim() == 2 ? mesh.axis_index(node, 1) : 0;
    for (int c = 0; c < field.components(); ++c) {
      double s = 0.0;
      for (std::size_t q = 0; q < k.offsets.size(); ++q) {
        const int ii = i + k.offsets[q][0];
        const int jj = j + k.offsets[q][1];
        if (ii < 0 || ii > n || jj < 0 || jj > (mesh.dim() == 2 ? n : 0)) continue;
        s += k.weights[q] * field(c, mesh.index(ii, jj));
      }
      out(c, node) = s;
    }
  }
  return out;
}

NodalField cutoff(const DomainMesh& mesh, double r) {
  if (!(r > 0.0) || r > 0.5) throw PreconditionError("cutoff radius must lie in (0, 1/2]");
  NodalField psi(mesh, 1);
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    const double s = std::clamp((mesh.boundary_distance(k) - r) / r, 0.0, 1.0);
    psi(0, k) = s * s * (3.0 - 2.0 * s);
  }
  return psi;
}

NodeMask colayer_mask(const DomainMesh& mesh, double r) {
  if (!(r >= 0.0)) throw PreconditionError("co-layer depth must be nonnegative");
  NodeMask m(mesh.size(), 0);
  for (std::size_t k = 0; k < mesh.size(); ++k) m[k] = mesh.boundary_distance(k) > r + 1e-12 ? 1 : 0;
  return m;
}

DiffQuotient diff_quotient(const NodalField& field, int axis, double h) {
  const DomainMesh& mesh = field.mesh();
  if (axis < 0 || axis >= mesh.dim()) throw PreconditionError("axis out of range");
  const int k = steps_of(mesh, h);
  const double hh = k * mesh.spacing();
  DiffQuotient dq{NodalField(mesh, field.components()), NodeMask(mesh.size(), 0)};
  for (std::size_t node = 0; node < mesh.size(); ++node) {
    const std::size_t s = shifted(mesh, node, axis, k);
    if (s == static_cast<std::size_t>(-1)) continue;
    dq.mask[node] = 1;
    for (int c = 0; c < field.components(); ++c) dq.values(c, node) = (field(c, s) - field(c, node)) / hh;
  }
  return dq;
}

double grid_step(const DomainMesh& mesh, double eps, double tau) {
  const double target = std::pow(eps, tau) / mesh.spacing();
  const double k = std::max(1.0, std::ceil(target - 1e-9));
  return k * mesh.spacing();
}

TauInterval admissible_tau(double p, double delta, double theta) {
  if (!(p > 1.0) || !std::isfinite(p)) throw PreconditionError("p must exceed 1");
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("delta must lie in (0,1)");
  if (!(theta > 0.0 && theta < 1.0)) throw PreconditionError("theta must lie in (0,1)");
  TauInterval t;
  t.alpha = alpha_of(p);
  t.gamma = gamma_of(p);
  t.beta = delta / (p * (1.0 + delta));
  if (p < 2.0) {
    const double base = 1.0 - t.gamma + theta * (p - 1.0);
    t.lower = 1.0;
    t.upper = (base + t.gamma * t.beta) / base;
    t.lower_alt = t.upper;
    t.upper_alt = (1.0 - t.gamma + t.gamma * t.beta) / (1.0 - t.gamma);
    t.branch = "p<2";
    t.default_tau = 0.5 * (t.lower + t.upper);
  } else if (p == 2.0) {
    t.lower = 1.0 + t.beta / theta;
    t.upper = std::numeric_limits<double>::infinity();
    t.branch = "p=2";
    t.default_tau = t.lower + 0.1;
  } else {
    const double base = 1.0 - t.alpha;
    t.lower = (base + theta + t.beta) / (base + theta);
    t.upper = (base + t.beta) / base;
    t.branch = "p>2";
    t.default_tau = 0.5 * (t.lower + t.upper);
  }
  if (!(t.lower < t.upper)) {
    std::ostringstream os;
    os << "empty tau interval: lower bound " << t.lower << " is not below upper bound " << t.upper;
    throw PreconditionError(os.str());
  }
  return t;
}

ApproxField build_first_order_gradient(const DirectionTable& table, const Solution& u0, double eps, double tau,
                                       const TwoScaleOptions& opt) {
  const DomainMesh& mesh = u0.u.mesh();
  if (table.dim() != mesh.dim()) throw PreconditionError("table and mesh dimensions differ");
  if (!mesh.compatible(eps)) throw PreconditionError("eps * n must be a positive integer");

  ApproxField out{NodalField(mesh, mesh.dim()), u0.grad_u, NodalField(mesh, mesh.dim()), NodalField(mesh, mesh.dim()),
                  eps, tau, 0.0, {}};

  const TauInterval range = admissible_tau(table.p(), opt.delta, opt.theta);
  if (!range.contains(tau)) {
    std::ostringstream os;
    os << "tau " << tau << " outside the admissible interval (" << range.lower << ", " << range.upper << ")";
    out.warnings.push_back(os.str());
  }
  double h = grid_step(mesh, eps, tau);
  if (h >= eps - 1e-12) {
    if (eps < 2.0 * mesh.spacing()) throw PreconditionError("mesh too coarse for a difference step below eps");
    h = std::round(eps / mesh.spacing() - 1.0) * mesh.spacing();
    out.warnings.push_back("h = eps^tau is not below eps on this mesh; reduced to eps - spacing");
  }
  out.h = h;

  out.phi = mollify(scaled_by(u0.grad_u, cutoff(mesh, 4.0 * eps)), eps);

  NodalField T(mesh, 1);
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    const Vec phi = out.phi.vec(k);
    T(0, k) = (phi[0] == 0.0 && phi[1] == 0.0) ? 0.0 : eps * table.N(cell_coordinate(mesh, k, eps), phi);
  }

  const int steps = steps_of(mesh, h);
  for (int a = 0; a < mesh.dim(); ++a) {
    for (std::size_t k = 0; k < mesh.size(); ++k) {
      const std::size_t s = shifted(mesh, k, a, steps);
      const double ts = s == static_cast<std::size_t>(-1) ? 0.0 : T(0, s);
      out.corrector_term(a, k) = (ts - T(0, k)) / h;
    }
  }
  out.V = out.grad_u0 + out.corrector_term;
  return out;
}

double error_gradient_norm(const Solution& u_eps, const ApproxField& V, double p, double eval_depth) {
  const NodeMask mask = colayer_mask(u_eps.u.mesh(), eval_depth > 0.0 ? eval_depth : V.eps);
  if (std::none_of(mask.begin(), mask.end(), [](char c) { return c != 0; }))
    throw PreconditionError("evaluation mask is empty");
  return lp_norm(u_eps.grad_u - V.V, p, mask);
}

double error_solution_norm(const Solution& u_eps, const Solution& u0, double p) {
  return lp_norm(u_eps.u - u0.u, p);
}

OmegaReport omega_M_eps(const Solution& u0, double eps, double vartheta) {
  const DomainMesh& mesh = u0.u.mesh();
  const NodalField g = u0.grad_u;
  OmegaReport rep;
  for (std::size_t k = 0; k < mesh.size(); ++k) rep.sup = std::max(rep.sup, magnitude(g, k));

  const int n = mesh.n();
  const int stride = mesh.dim() == 2 ? std::max(1, (n + 1 + 64) / 65) : std::max(1, (n + 1 + 1024) / 1025);
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    bool keep = true;
    for (int a = 0; a < mesh.dim(); ++a) keep = keep && mesh.axis_index(k, a) % stride == 0;
    if (keep) nodes.push_back(k);
  }
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const Vec xa = mesh.point(nodes[a]);
    const Vec ga = g.vec(nodes[a]);
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const double dist = norm(mesh.point(nodes[b]) - xa);
      if (dist >= 0.25) continue;
      rep.holder = std::max(rep.holder, norm(g.vec(nodes[b]) - ga) / std::pow(dist, vartheta));
    }
  }
  rep.M = rep.holder + rep.sup;
  const double level = rep.M * std::pow(eps, vartheta);
  rep.mask.assign(mesh.size(), 0);
  std::size_t count = 0;
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    if (magnitude(g, k) <= level) {
      rep.mask[k] = 1;
      ++count;
    }
  }
  rep.fraction = static_cast<double>(count) / static_cast<double>(mesh.size());
  return rep;
}

SmoothingReport weighted_smoothing_check(const Solution& u0, double eps, double p, double r, double vartheta) {
  const DomainMesh& mesh = u0.u.mesh();
  const OmegaReport omega = omega_M_eps(u0, eps, vartheta);
  const NodalField phi = scaled_by(u0.grad_u, cutoff(mesh, std::min(0.5, 4.0 * eps)));
  const NodalField smooth = mollify(phi, eps);

  // |grad phi| as the Frobenius norm of the componentwise nodal gradients.
  NodalField grad_sq(mesh, 1);
  for (int c = 0; c < phi.components(); ++c) {
    NodalField comp(mesh, 1);
    std::copy(phi.component(c).begin(), phi.component(c).end(), comp.values().begin());
    const NodalField gc = nodal_gradient(comp);
    for (std::size_t k = 0; k < mesh.size(); ++k) {
      const double m = magnitude(gc, k);
      grad_sq(0, k) += m * m;
    }
  }

  SmoothingReport rep;
  const double vol = node_volume(mesh);
  std::size_t count = 0;
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    if (omega.mask[k]) continue;
    ++count;
    const double gu = magnitude(u0.grad_u, k);
    const double w = std::pow(std::max(gu, 1e-12), r);
    double d2 = 0.0;
    for (int c = 0; c < phi.components(); ++c) d2 += (phi(c, k) - smooth(c, k)) * (phi(c, k) - smooth(c, k));
    rep.left += std::pow(std::sqrt(d2), p) * w * vol;
    rep.right += std::pow(std::sqrt(grad_sq(0, k)), p) * w * vol;
  }
  if (count == 0) throw PreconditionError("complement of the degenerate set is empty");
  rep.complement_fraction = static_cast<double>(count) / static_cast<double>(mesh.size());
  rep.right *= std::pow(eps, p);
  rep.ratio = rep.right > 0.0 ? rep.left / rep.right : (rep.left > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return rep;
}

DecompositionReport phi_decomposition_check(const DirectionTable& table, const NodalField& phi, double eps,
                                            double tau, int quadrature_samples) {
  const DomainMesh& mesh = phi.mesh();
  if (!mesh.compatible(eps)) throw PreconditionError("eps * n must be a positive integer");
  if (quadrature_samples < 8) throw PreconditionError("need at least 8 quadrature samples");
  DecompositionReport rep;
  rep.h = grid_step(mesh, eps, tau);
  const int steps = steps_of(mesh, rep.h);
  const double alpha = alpha_of(table.p());
  const double h = rep.h;
  double rem2 = 0.0, norm2 = 0.0, first2 = 0.0, quad2 = 0.0;
  const double vol = node_volume(mesh);
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    const std::size_t s = shifted(mesh, k, 0, steps);
    if (s == static_cast<std::size_t>(-1)) continue;
    const Vec y = cell_coordinate(mesh, k, eps);
    const Vec yh = cell_coordinate(mesh, s, eps);
    const Vec pa = phi.vec(k);
    const Vec pb = phi.vec(s);
    const double n_yh_b = table.N(yh, pb);
    const double n_y_b = table.N(y, pb);
    const double n_y_a = table.N(y, pa);
    const double first = eps * (n_yh_b - n_y_b) / h;
    const double remainder = eps * (n_y_b - n_y_a) / h;
    const double dphi = norm((1.0 / h) * (pb - pa));
    const double normalizer = eps * std::pow(h, alpha - 1.0) * std::pow(dphi, alpha);

    // Trapezoid rule for int_0^1 d_1 N(y + t (h/eps) e_1, phi(x + h e_1)) dt.
    double trap = 0.0;
    for (int q = 0; q <= quadrature_samples; ++q) {
      const double t = static_cast<double>(q) / quadrature_samples;
      const double w = (q == 0 || q == quadrature_samples) ? 0.5 : 1.0;
      trap += w * table.grad_N({y[0] + t * h / eps, y[1]}, pb)[0];
    }
    trap /= quadrature_samples;

    rem2 += remainder * remainder * vol;
    norm2 += normalizer * normalizer * vol;
    first2 += first * first * vol;
    quad2 += (first - trap) * (first - trap) * vol;
  }
  rep.remainder = std::sqrt(rem2);
  rep.first_term = std::sqrt(first2);
  rep.quadrature_defect = std::sqrt(quad2);
  const double nn = std::sqrt(norm2);
  rep.normalized = nn > 0.0 ? rep.remainder / nn : (rep.remainder > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return rep;
}

}  // namespace homog
