#include "trsqp/bench.hpp"

#include <cmath>
#include <memory>

#include "trsqp/geometry.hpp"
#include "trsqp/oracle.hpp"

namespace trsqp {

namespace {

Vector vec(std::initializer_list<double> vals) {
  Vector v(static_cast<Index>(vals.size()));
  Index i = 0;
  for (double x : vals) v(i++) = x;
  return v;
}

ProblemInstance make_maratos() {
  ProblemInstance p;
  p.name = "maratos";
  p.dim_x = 2;
  p.dim_c = 1;
  p.objective = [](const Vector& x) { return 2 * (x(0) * x(0) + x(1) * x(1) - 1) - x(0); };
  p.objective_grad = [](const Vector& x) { return vec({4 * x(0) - 1, 4 * x(1)}); };
  p.objective_hess = [](const Vector&) { return Matrix(4 * Matrix::Identity(2, 2)); };
  p.constraint = [](const Vector& x) { return vec({x(0) * x(0) + x(1) * x(1) - 1}); };
  p.constraint_jac = [](const Vector& x) {
    Matrix G(1, 2);
    G << 2 * x(0), 2 * x(1);
    return G;
  };
  p.constraint_hess = [](const Vector&) {
    return std::vector<Matrix>{2 * Matrix::Identity(2, 2)};
  };
  p.x0 = vec({1.1, 0.1});
  return p;
}

ProblemInstance make_hs39() {
  ProblemInstance p;
  p.name = "hs39";
  p.dim_x = 4;
  p.dim_c = 2;
  p.objective = [](const Vector& x) { return -x(0); };
  p.objective_grad = [](const Vector&) { return vec({-1, 0, 0, 0}); };
  p.objective_hess = [](const Vector&) { return Matrix(Matrix::Zero(4, 4)); };
  p.constraint = [](const Vector& x) {
    return vec({x(1) - x(0) * x(0) * x(0) - x(2) * x(2), x(0) * x(0) - x(1) - x(3) * x(3)});
  };
  p.constraint_jac = [](const Vector& x) {
    Matrix G(2, 4);
    G << -3 * x(0) * x(0), 1, -2 * x(2), 0,  //
        2 * x(0), -1, 0, -2 * x(3);
    return G;
  };
  p.constraint_hess = [](const Vector& x) {
    Matrix h1 = Matrix::Zero(4, 4);
    h1(0, 0) = -6 * x(0);
    h1(2, 2) = -2;
    Matrix h2 = Matrix::Zero(4, 4);
    h2(0, 0) = 2;
    h2(3, 3) = -2;
    return std::vector<Matrix>{h1, h2};
  };
  p.x0 = vec({2, 2, 2, 2});
  return p;
}

ProblemInstance make_hs40() {
  ProblemInstance p;
  p.name = "hs40";
  p.dim_x = 4;
  p.dim_c = 3;
  p.objective = [](const Vector& x) { return -x(0) * x(1) * x(2) * x(3); };
  p.objective_grad = [](const Vector& x) {
    return vec({-x(1) * x(2) * x(3), -x(0) * x(2) * x(3), -x(0) * x(1) * x(3), -x(0) * x(1) * x(2)});
  };
  p.objective_hess = [](const Vector& x) {
    Matrix h = Matrix::Zero(4, 4);
    for (Index i = 0; i < 4; ++i) {
      for (Index j = i + 1; j < 4; ++j) {
        double prod = -1;
        for (Index l = 0; l < 4; ++l) {
          if (l != i && l != j) prod *= x(l);
        }
        h(i, j) = prod;
        h(j, i) = prod;
      }
    }
    return h;
  };
  p.constraint = [](const Vector& x) {
    return vec({x(0) * x(0) * x(0) + x(1) * x(1) - 1, x(0) * x(0) * x(3) - x(2),
                x(3) * x(3) - x(1)});
  };
  p.constraint_jac = [](const Vector& x) {
    Matrix G(3, 4);
    G << 3 * x(0) * x(0), 2 * x(1), 0, 0,  //
        2 * x(0) * x(3), 0, -1, x(0) * x(0),  //
        0, -1, 0, 2 * x(3);
    return G;
  };
  p.constraint_hess = [](const Vector& x) {
    Matrix h1 = Matrix::Zero(4, 4);
    h1(0, 0) = 6 * x(0);
    h1(1, 1) = 2;
    Matrix h2 = Matrix::Zero(4, 4);
    h2(0, 0) = 2 * x(3);
    h2(0, 3) = 2 * x(0);
    h2(3, 0) = 2 * x(0);
    Matrix h3 = Matrix::Zero(4, 4);
    h3(3, 3) = 2;
    return std::vector<Matrix>{h1, h2, h3};
  };
  p.x0 = vec({0.8, 0.8, 0.8, 0.8});
  return p;
}

ProblemInstance make_hs42() {
  ProblemInstance p;
  p.name = "hs42";
  p.dim_x = 4;
  p.dim_c = 2;
  p.objective = [](const Vector& x) {
    const Vector t = x - vec({1, 2, 3, 4});
    return t.squaredNorm();
  };
  p.objective_grad = [](const Vector& x) { return Vector(2 * (x - vec({1, 2, 3, 4}))); };
  p.objective_hess = [](const Vector&) { return Matrix(2 * Matrix::Identity(4, 4)); };
  p.constraint = [](const Vector& x) {
    return vec({x(0) - 2, x(2) * x(2) + x(3) * x(3) - 2});
  };
  p.constraint_jac = [](const Vector& x) {
    Matrix G(2, 4);
    G << 1, 0, 0, 0,  //
        0, 0, 2 * x(2), 2 * x(3);
    return G;
  };
  p.constraint_hess = [](const Vector&) {
    Matrix h2 = Matrix::Zero(4, 4);
    h2(2, 2) = 2;
    h2(3, 3) = 2;
    return std::vector<Matrix>{Matrix::Zero(4, 4), h2};
  };
  p.x0 = vec({1, 1, 1, 1});
  return p;
}

ProblemInstance make_hs78() {
  ProblemInstance p;
  p.name = "hs78";
  p.dim_x = 5;
  p.dim_c = 3;
  p.objective = [](const Vector& x) { return x.prod(); };
  p.objective_grad = [](const Vector& x) {
    Vector g(5);
    for (Index i = 0; i < 5; ++i) {
      double prod = 1;
      for (Index l = 0; l < 5; ++l) {
        if (l != i) prod *= x(l);
      }
      g(i) = prod;
    }
    return g;
  };
  p.objective_hess = [](const Vector& x) {
    Matrix h = Matrix::Zero(5, 5);
    for (Index i = 0; i < 5; ++i) {
      for (Index j = i + 1; j < 5; ++j) {
        double prod = 1;
        for (Index l = 0; l < 5; ++l) {
          if (l != i && l != j) prod *= x(l);
        }
        h(i, j) = prod;
        h(j, i) = prod;
      }
    }
    return h;
  };
  p.constraint = [](const Vector& x) {
    return vec({x.squaredNorm() - 10, x(1) * x(2) - 5 * x(3) * x(4),
                x(0) * x(0) * x(0) + x(1) * x(1) * x(1) + 1});
  };
  p.constraint_jac = [](const Vector& x) {
    Matrix G(3, 5);
    G.row(0) = 2 * x.transpose();
    G.row(1) << 0, x(2), x(1), -5 * x(4), -5 * x(3);
    G.row(2) << 3 * x(0) * x(0), 3 * x(1) * x(1), 0, 0, 0;
    return G;
  };
  p.constraint_hess = [](const Vector& x) {
    Matrix h1 = 2 * Matrix::Identity(5, 5);
    Matrix h2 = Matrix::Zero(5, 5);
    h2(1, 2) = 1;
    h2(2, 1) = 1;
    h2(3, 4) = -5;
    h2(4, 3) = -5;
    Matrix h3 = Matrix::Zero(5, 5);
    h3(0, 0) = 6 * x(0);
    h3(1, 1) = 6 * x(1);
    return std::vector<Matrix>{h1, h2, h3};
  };
  p.x0 = vec({-2, 1.5, 2, -1, -1});
  return p;
}

ProblemInstance make_hs79() {
  ProblemInstance p;
  p.name = "hs79";
  p.dim_x = 5;
  p.dim_c = 3;
  const double sqrt2 = std::sqrt(2.0);
  p.objective = [](const Vector& x) {
    const double a = x(0) - 1, b = x(0) - x(1), c = x(1) - x(2);
    const double d = x(2) - x(3), e = x(3) - x(4);
    return a * a + b * b + c * c + d * d * d * d + e * e * e * e;
  };
  p.objective_grad = [](const Vector& x) {
    const double b = x(0) - x(1), c = x(1) - x(2);
    const double d3 = std::pow(x(2) - x(3), 3), e3 = std::pow(x(3) - x(4), 3);
    return vec({2 * (x(0) - 1) + 2 * b, -2 * b + 2 * c, -2 * c + 4 * d3, -4 * d3 + 4 * e3, -4 * e3});
  };
  p.objective_hess = [](const Vector& x) {
    const double d2 = 12 * std::pow(x(2) - x(3), 2), e2 = 12 * std::pow(x(3) - x(4), 2);
    Matrix h = Matrix::Zero(5, 5);
    h(0, 0) = 4;
    h(0, 1) = h(1, 0) = -2;
    h(1, 1) = 4;
    h(1, 2) = h(2, 1) = -2;
    h(2, 2) = 2 + d2;
    h(2, 3) = h(3, 2) = -d2;
    h(3, 3) = d2 + e2;
    h(3, 4) = h(4, 3) = -e2;
    h(4, 4) = e2;
    return h;
  };
  p.constraint = [sqrt2](const Vector& x) {
    return vec({x(0) + x(1) * x(1) + x(2) * x(2) * x(2) - 2 - 3 * sqrt2,
                x(1) - x(2) * x(2) + x(3) + 2 - 2 * sqrt2, x(0) * x(4) - 2});
  };
  p.constraint_jac = [](const Vector& x) {
    Matrix G(3, 5);
    G << 1, 2 * x(1), 3 * x(2) * x(2), 0, 0,  //
        0, 1, -2 * x(2), 1, 0,  //
        x(4), 0, 0, 0, x(0);
    return G;
  };
  p.constraint_hess = [](const Vector& x) {
    Matrix h1 = Matrix::Zero(5, 5);
    h1(1, 1) = 2;
    h1(2, 2) = 6 * x(2);
    Matrix h2 = Matrix::Zero(5, 5);
    h2(2, 2) = -2;
    Matrix h3 = Matrix::Zero(5, 5);
    h3(0, 4) = 1;
    h3(4, 0) = 1;
    return std::vector<Matrix>{h1, h2, h3};
  };
  p.x0 = vec({2, 2, 2, 2, 2});
  return p;
}

ProblemInstance make_bt5() {
  ProblemInstance p;
  p.name = "bt5";
  p.dim_x = 3;
  p.dim_c = 2;
  p.objective = [](const Vector& x) {
    return 1000 - x(0) * x(0) - 2 * x(1) * x(1) - x(2) * x(2) - x(0) * x(1) - x(0) * x(2);
  };
  p.objective_grad = [](const Vector& x) {
    return vec({-2 * x(0) - x(1) - x(2), -4 * x(1) - x(0), -2 * x(2) - x(0)});
  };
  p.objective_hess = [](const Vector&) {
    Matrix h(3, 3);
    h << -2, -1, -1,  //
        -1, -4, 0,  //
        -1, 0, -2;
    return h;
  };
  p.constraint = [](const Vector& x) {
    return vec({x.squaredNorm() - 25, 8 * x(0) + 14 * x(1) + 7 * x(2) - 56});
  };
  p.constraint_jac = [](const Vector& x) {
    Matrix G(2, 3);
    G.row(0) = 2 * x.transpose();
    G.row(1) << 8, 14, 7;
    return G;
  };
  p.constraint_hess = [](const Vector&) {
    return std::vector<Matrix>{2 * Matrix::Identity(3, 3), Matrix::Zero(3, 3)};
  };
  p.x0 = vec({2, 2, 2});
  return p;
}

ProblemInstance quadratic_problem(const std::string& name, const QuadraticData& data,
                                  const Vector& x0) {
  ProblemInstance p;
  p.name = name;
  p.dim_x = data.Q.rows();
  p.dim_c = data.A.rows();
  p.objective = [data](const Vector& x) { return 0.5 * x.dot(data.Q * x) - data.b.dot(x); };
  p.objective_grad = [data](const Vector& x) { return Vector(data.Q * x - data.b); };
  p.objective_hess = [data](const Vector&) { return data.Q; };
  p.constraint = [data](const Vector& x) { return Vector(data.A * x - data.a); };
  p.constraint_jac = [data](const Vector&) { return data.A; };
  p.constraint_hess = [data](const Vector&) {
    return std::vector<Matrix>(static_cast<size_t>(data.A.rows()),
                               Matrix::Zero(data.Q.rows(), data.Q.rows()));
  };
  p.x0 = x0;
  return p;
}

QuadraticData quad2_data() {
  QuadraticData d;
  d.Q = Matrix(2, 2);
  d.Q << 2, 0, 0, 4;
  d.b = vec({1, 1});
  d.A = Matrix(1, 2);
  d.A << 1, 1;
  d.a = vec({1});
  return d;
}

QuadraticData quad12_data() {
  const Index dim = 12, m = 5;
  RngStream rng(424242, 9);
  Matrix S(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) S(i, j) = rng.normal();
  }
  QuadraticData d;
  d.Q = Matrix(S * S.transpose() / double(dim) + Matrix::Identity(dim, dim));
  d.b = Vector(dim);
  for (Index i = 0; i < dim; ++i) d.b(i) = rng.normal();
  d.A = Matrix(m, dim);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < dim; ++j) d.A(i, j) = rng.normal() / std::sqrt(double(dim));
  }
  d.a = Vector(m);
  for (Index i = 0; i < m; ++i) d.a(i) = rng.normal();
  return d;
}

}  // namespace

ProblemInstance make_builtin_problem(const std::string& name) {
  if (name == "maratos") return make_maratos();
  if (name == "hs39") return make_hs39();
  if (name == "hs40") return make_hs40();
  if (name == "hs42") return make_hs42();
  if (name == "hs78") return make_hs78();
  if (name == "hs79") return make_hs79();
  if (name == "bt5") return make_bt5();
  if (name == "quad2") return quadratic_problem("quad2", quad2_data(), vec({5, -3}));
  if (name == "quad12") {
    Vector x0 = Vector::Constant(12, 1.5);
    x0(0) = -2;
    x0(7) = 3;
    return quadratic_problem("quad12", quad12_data(), x0);
  }
  throw std::invalid_argument("unknown built-in problem '" + name + "'");
}

std::vector<std::string> builtin_problem_names() {
  return {"maratos", "hs39", "hs40", "hs42", "hs78", "hs79", "bt5", "quad2", "quad12"};
}

std::optional<QuadraticData> builtin_quadratic_data(const std::string& name) {
  if (name == "quad2") return quad2_data();
  if (name == "quad12") return quad12_data();
  return std::nullopt;
}

std::optional<BuiltinOptimum> builtin_optimum(const std::string& name) {
  if (name == "maratos") return BuiltinOptimum{vec({1, 0}), -1.0};
  if (name == "hs39") return BuiltinOptimum{vec({1, 1, 0, 0}), -1.0};
  if (name == "hs40") {
    const double x1 = std::pow(2.0, -1.0 / 3.0);
    const double x2 = std::pow(2.0, -1.0 / 2.0);
    const double x4 = std::pow(2.0, -1.0 / 4.0);
    return BuiltinOptimum{vec({x1, x2, x1 * x1 * x4, x4}), -0.25};
  }
  if (name == "hs42") {
    const double s = std::sqrt(2.0);
    return BuiltinOptimum{vec({2, 2, 0.6 * s, 0.8 * s}), 28 - 10 * s};
  }
  // hs78/hs79/bt5 optima are tabulated to limited precision; the verification
  // suite polishes them with a Newton-KKT oracle before asserting residuals.
  if (name == "hs78") {
    return BuiltinOptimum{vec({-1.717143, 1.595709, 1.827247, -0.7636430, -0.7636430}), -2.91970041};
  }
  if (name == "hs79") {
    return BuiltinOptimum{vec({1.191127, 1.362603, 1.472818, 1.635017, 1.679081}), 0.0787768};
  }
  if (name == "bt5") {
    return BuiltinOptimum{vec({3.51212, 0.216988, 3.55217}), 961.715172130};
  }
  return std::nullopt;
}

std::pair<double, Vector> logreg_value_grad(const LogRegProblem& problem, const Vector& x,
                                            std::optional<Index> sample) {
  const Matrix& Z = problem.dataset.features;
  const Vector& y = problem.dataset.labels;
  const Index n = problem.dataset.n_samples;
  auto one = [&](Index i, double& value, Vector& grad) {
    const double t = y(i) * Z.row(i).dot(x);
    // log(1 + exp(-t)) without overflow on either tail.
    value = t >= 0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
    const double s = t >= 0 ? std::exp(-t) / (1 + std::exp(-t)) : 1 / (1 + std::exp(t));
    grad = (-y(i) * s) * Z.row(i).transpose();
  };
  double value = 0;
  Vector grad;
  if (sample) {
    one(*sample, value, grad);
    return {value, grad};
  }
  grad = Vector::Zero(x.size());
  Vector gi;
  double vi = 0;
  for (Index i = 0; i < n; ++i) {
    one(i, vi, gi);
    value += vi;
    grad += gi;
  }
  return {value / double(n), grad / double(n)};
}

LogRegProblem make_logreg_problem(const Dataset& dataset, Index m, std::uint64_t seed) {
  if (!(m > 0 && m < dataset.dim)) {
    throw std::invalid_argument("make_logreg_problem: require 0 < m < dim");
  }
  LogRegProblem lp;
  lp.dataset = dataset;
  RngStream rng(seed, 3);
  bool ok = false;
  for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
    lp.A = Matrix(m, dataset.dim);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < dataset.dim; ++j) lp.A(i, j) = rng.normal();
    }
    lp.b = Vector(m);
    for (Index i = 0; i < m; ++i) lp.b(i) = rng.normal();
    try {
      factorize<double>(lp.A);
      ok = true;
    } catch (const RankDeficiencyError&) {
    }
  }
  if (!ok) {
    throw std::runtime_error("make_logreg_problem: generated A stayed rank-deficient");
  }

  // The problem views share the dataset and constraints through a copy held
  // by the closures; LogRegProblem itself stays independently copyable.
  auto self = std::make_shared<LogRegProblem>();
  self->dataset = lp.dataset;
  self->A = lp.A;
  self->b = lp.b;

  ProblemInstance p;
  p.name = "logreg";
  p.dim_x = dataset.dim;
  p.dim_c = m;
  p.objective = [self](const Vector& x) { return logreg_value_grad(*self, x).first; };
  p.objective_grad = [self](const Vector& x) { return logreg_value_grad(*self, x).second; };
  p.objective_hess = [self](const Vector& x) {
    const Matrix& Z = self->dataset.features;
    const Vector& y = self->dataset.labels;
    Matrix h = Matrix::Zero(x.size(), x.size());
    for (Index i = 0; i < self->dataset.n_samples; ++i) {
      const double t = y(i) * Z.row(i).dot(x);
      const double s = t >= 0 ? std::exp(-t) / (1 + std::exp(-t)) : 1 / (1 + std::exp(t));
      h += (s * (1 - s)) * (Z.row(i).transpose() * Z.row(i));
    }
    return Matrix(h / double(self->dataset.n_samples));
  };
  p.constraint = [self](const Vector& x) { return Vector(self->A * x - self->b); };
  p.constraint_jac = [self](const Vector&) { return self->A; };
  p.constraint_hess = [self, m](const Vector&) {
    return std::vector<Matrix>(static_cast<size_t>(m),
                               Matrix::Zero(self->dataset.dim, self->dataset.dim));
  };
  p.num_components = dataset.n_samples;
  p.component_grad = [self](const Vector& x, Index i) {
    return logreg_value_grad(*self, x, i).second;
  };
  p.component_hess = [self](const Vector& x, Index i) {
    const Matrix& Z = self->dataset.features;
    const double t = self->dataset.labels(i) * Z.row(i).dot(x);
    const double s = t >= 0 ? std::exp(-t) / (1 + std::exp(-t)) : 1 / (1 + std::exp(t));
    return Matrix((s * (1 - s)) * (Z.row(i).transpose() * Z.row(i)));
  };
  p.x0 = Vector::Ones(dataset.dim);
  lp.problem = std::move(p);
  return lp;
}

}  // namespace trsqp
