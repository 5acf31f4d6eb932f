#include "gpa/params.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "gpa/errors.hpp"

namespace gpa {

namespace {
constexpr char kMagic[8] = {'G', 'P', 'A', 'P', 'S', 'v', '1', '\n'};
}

Tensor& ParamSet::add(const std::string& name, Tensor t) {
  if (index_.count(name)) throw std::logic_error("duplicate parameter name: " + name);
  index_[name] = order_.size();
  order_.push_back(name);
  tensors_.push_back(std::move(t));
  return tensors_.back();
}

Tensor& ParamSet::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no such parameter: " + name);
  return tensors_[it->second];
}

const Tensor& ParamSet::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no such parameter: " + name);
  return tensors_[it->second];
}

int64_t ParamSet::total_elems() const {
  int64_t n = 0;
  for (const Tensor& t : tensors_) n += t.numel();
  return n;
}

void ParamSet::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  uint32_t count = static_cast<uint32_t>(order_.size());
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (size_t i = 0; i < order_.size(); ++i) {
    uint32_t len = static_cast<uint32_t>(order_[i].size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(order_[i].data(), len);
    int32_t dims[2] = {tensors_[i].nrows, tensors_[i].ncols};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(tensors_[i].values.data()),
              static_cast<std::streamsize>(tensors_[i].values.size() * sizeof(double)));
  }
}

ParamSet ParamSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for read: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("bad parameter file magic: " + path.string());
  uint32_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  ParamSet ps;
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string name(len, '\0');
    in.read(name.data(), len);
    int32_t dims[2];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    Tensor t(dims[0], dims[1]);
    in.read(reinterpret_cast<char*>(t.values.data()),
            static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated parameter file: " + path.string());
    ps.add(name, std::move(t));
  }
  return ps;
}

void ParamSet::add_scaled(const GradMap& grads, double alpha) {
  for (const auto& [name, g] : grads) {
    Tensor& t = at(name);
    if (!t.same_shape(g)) throw ShapeError("add_scaled: shape mismatch for " + name);
    for (size_t i = 0; i < t.values.size(); ++i) t.values[i] += alpha * g.values[i];
  }
}

double dot(const GradMap& a, const GradMap& b) {
  double s = 0.0;
  for (const auto& [name, ga] : a) {
    auto it = b.find(name);
    if (it == b.end()) continue;
    for (size_t i = 0; i < ga.values.size(); ++i) s += ga.values[i] * it->second.values[i];
  }
  return s;
}

double norm2(const GradMap& g) { return std::sqrt(dot(g, g)); }

bool all_finite(const GradMap& g) {
  for (const auto& [name, t] : g)
    for (double x : t.values)
      if (!std::isfinite(x)) return false;
  return true;
}

GradMap subtract(const GradMap& a, const GradMap& b) {
  GradMap out = a;
  for (const auto& [name, gb] : b) {
    auto it = out.find(name);
    if (it == out.end()) {
      Tensor t = gb;
      for (double& x : t.values) x = -x;
      out.emplace(name, std::move(t));
    } else {
      for (size_t i = 0; i < gb.values.size(); ++i) it->second.values[i] -= gb.values[i];
    }
  }
  return out;
}

GradMap scaled(const GradMap& g, double alpha) {
  GradMap out = g;
  for (auto& [name, t] : out)
    for (double& x : t.values) x *= alpha;
  return out;
}

Tensor uniform_init(int rows, int cols, RngStream& rng) {
  Tensor t(rows, cols);
  const double a = std::sqrt(6.0 / (rows + cols));
  for (double& x : t.values) x = (rng.next_double() * 2.0 - 1.0) * a;
  return t;
}

std::map<std::string, Var> bind_params(Tape& tape, const ParamSet& params) {
  std::map<std::string, Var> bound;
  for (size_t i = 0; i < params.size(); ++i)
    bound.emplace(params.name(i), tape.leaf(params.tensor(i)));
  return bound;
}

GradMap collect_grads(const std::map<std::string, Var>& bound) {
  GradMap out;
  for (const auto& [name, var] : bound) out.emplace(name, var.tape->grad(var));
  return out;
}

void sgd_step(ParamSet& params, const GradMap& grads, double lr) {
  if (!all_finite(grads)) throw NonFiniteGradient("sgd_step: non-finite gradient");
  params.add_scaled(grads, -lr);
}

void adam_step(ParamSet& params, const GradMap& grads, double lr, AdamState& state, double beta1,
               double beta2, double eps) {
  if (!all_finite(grads)) throw NonFiniteGradient("adam_step: non-finite gradient");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (const auto& [name, g] : grads) {
    Tensor& w = params.at(name);
    auto [it, fresh] = state.moments.try_emplace(
        name, std::make_pair(Tensor(g.nrows, g.ncols), Tensor(g.nrows, g.ncols)));
    Tensor& m = it->second.first;
    Tensor& v = it->second.second;
    for (size_t i = 0; i < g.values.size(); ++i) {
      m.values[i] = beta1 * m.values[i] + (1.0 - beta1) * g.values[i];
      v.values[i] = beta2 * v.values[i] + (1.0 - beta2) * g.values[i] * g.values[i];
      const double mhat = m.values[i] / bc1;
      const double vhat = v.values[i] / bc2;
      w.values[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

double grad_check(const std::function<Var(Tape&, Var)>& build, const Tensor& x, double h) {
  Tensor analytic;
  {
    Tape tape;
    Var xv = tape.leaf(x);
    Var loss = build(tape, xv);
    tape.run_backward(loss);
    analytic = tape.grad(xv);
  }
  auto eval = [&](const Tensor& probe) {
    Tape tape;
    Var xv = tape.leaf(probe);
    return build(tape, xv).value().item();
  };
  double worst = 0.0;
  Tensor probe = x;
  for (size_t i = 0; i < x.values.size(); ++i) {
    probe.values[i] = x.values[i] + h;
    const double fp = eval(probe);
    probe.values[i] = x.values[i] - h;
    const double fm = eval(probe);
    probe.values[i] = x.values[i];
    const double fd = (fp - fm) / (2.0 * h);
    const double a = analytic.values[i];
    const double rel = std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace gpa
