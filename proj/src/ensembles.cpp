#include "locc/ensembles.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace locc {

namespace {

void check_angle_open_interval(double a, const char* name) {
  if (!(a > 0.0 && a < std::numbers::pi / 2.0))
    throw std::invalid_argument(std::string(name) +
                                " must lie strictly inside (0, pi/2), got " +
                                std::to_string(a));
}

// First nonzero amplitude made real positive; the joint state only moves by a
// global phase.
void canonicalize_phase(Ket& k) {
  for (int i = 0; i < k.dim(); ++i) {
    const Complex c = k.amps[i];
    if (std::abs(c) > kBranchCutoff) {
      k.amps *= std::conj(c) / std::abs(c);
      return;
    }
  }
}

}  // namespace

const BipartiteProductState& ProductEnsemble::state(int label) const {
  if (label < 1 || label > size())
    throw std::out_of_range("state label out of range: " + std::to_string(label));
  return states[static_cast<std::size_t>(label) - 1];
}

const char* party_name(Party p) { return p == Party::Alice ? "alice" : "bob"; }

ProductEnsemble make_product_ensemble(int dim_a, int dim_b,
                                      std::vector<std::pair<Ket, Ket>> parts) {
  if (dim_a < 1 || dim_b < 1)
    throw std::invalid_argument("ensemble dimensions must be positive");
  if (parts.empty()) throw std::invalid_argument("ensemble must contain at least one state");
  ProductEnsemble e;
  e.dim_a = dim_a;
  e.dim_b = dim_b;
  int label = 1;
  for (auto& [a, b] : parts) {
    if (a.dim() != dim_a || b.dim() != dim_b)
      throw std::invalid_argument("state " + std::to_string(label) +
                                  ": local dimension mismatch");
    canonicalize_phase(a);
    canonicalize_phase(b);
    e.states.push_back({label++, std::move(a), std::move(b)});
  }
  validate_ensemble(e);
  return e;
}

void validate_ensemble(const ProductEnsemble& e) {
  for (const BipartiteProductState& s : e.states) {
    const double ra = std::abs(s.alice.norm() - 1.0);
    const double rb = std::abs(s.bob.norm() - 1.0);
    if (ra > kInvariantTol || rb > kInvariantTol)
      throw std::invalid_argument("state " + std::to_string(s.label) +
                                  " not normalized, residual = " +
                                  std::to_string(std::max(ra, rb)));
  }
  for (int i = 0; i < e.size(); ++i) {
    for (int j = i + 1; j < e.size(); ++j) {
      const Complex joint = inner(e.states[i].alice, e.states[j].alice) *
                            inner(e.states[i].bob, e.states[j].bob);
      if (std::abs(joint) > kInvariantTol)
        throw std::invalid_argument(
            "states (" + std::to_string(e.states[i].label) + ", " +
            std::to_string(e.states[j].label) +
            ") not jointly orthogonal, residual = " + std::to_string(std::abs(joint)));
    }
  }
}

//============================================================================
// Named families
//============================================================================

ProductEnsemble four_state() { return four_state_general(std::numbers::pi / 4.0); }

ProductEnsemble four_state_general(double theta) {
  check_angle_open_interval(theta, "theta");
  const double c = std::cos(theta), s = std::sin(theta);
  const Ket a0{1.0, 0.0}, a1{0.0, 1.0};
  const Ket b0{1.0, 0.0}, b1{0.0, 1.0};
  std::vector<std::pair<Ket, Ket>> parts;
  parts.emplace_back(a0, b0);
  parts.emplace_back(a1, b0);
  parts.emplace_back(Ket{c, s}, b1);
  parts.emplace_back(Ket{s, -c}, b1);
  return make_product_ensemble(2, 2, std::move(parts));
}

ProductEnsemble nine_state() {
  const double q = std::numbers::pi / 4.0;
  return nine_state_general(q, q, q, q);
}

ProductEnsemble nine_state_general(double eta, double xi, double theta, double gamma) {
  check_angle_open_interval(eta, "eta");
  check_angle_open_interval(xi, "xi");
  check_angle_open_interval(theta, "theta");
  check_angle_open_interval(gamma, "gamma");
  const double ce = std::cos(eta), se = std::sin(eta);
  const double cx = std::cos(xi), sx = std::sin(xi);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cg = std::cos(gamma), sg = std::sin(gamma);
  const Ket e0{1.0, 0.0, 0.0}, e1{0.0, 1.0, 0.0}, e2{0.0, 0.0, 1.0};
  std::vector<std::pair<Ket, Ket>> parts;
  parts.emplace_back(e0, Ket{ce, se, 0.0});
  parts.emplace_back(e0, Ket{se, -ce, 0.0});
  parts.emplace_back(e2, Ket{0.0, cx, sx});
  parts.emplace_back(e2, Ket{0.0, sx, -cx});
  parts.emplace_back(Ket{ct, st, 0.0}, e2);
  parts.emplace_back(Ket{st, -ct, 0.0}, e2);
  parts.emplace_back(Ket{0.0, cg, sg}, e0);
  parts.emplace_back(Ket{0.0, sg, -cg}, e0);
  parts.emplace_back(e1, e1);
  return make_product_ensemble(3, 3, std::move(parts));
}

ProductEnsemble computational(int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1)
    throw std::invalid_argument("computational: dimensions must be positive");
  std::vector<std::pair<Ket, Ket>> parts;
  parts.reserve(static_cast<std::size_t>(dim_a) * dim_b);
  for (int a = 0; a < dim_a; ++a)
    for (int b = 0; b < dim_b; ++b)
      parts.emplace_back(Ket::basis(dim_a, a), Ket::basis(dim_b, b));
  return make_product_ensemble(dim_a, dim_b, std::move(parts));
}

//============================================================================
// Overlap structure
//============================================================================

std::vector<OverlapPair> passive_overlap_pairs(const ProductEnsemble& e, Party acting) {
  std::vector<OverlapPair> pairs;
  for (int i = 0; i < e.size(); ++i) {
    for (int j = i + 1; j < e.size(); ++j) {
      const Ket& pi = acting == Party::Alice ? e.states[i].bob : e.states[i].alice;
      const Ket& pj = acting == Party::Alice ? e.states[j].bob : e.states[j].alice;
      const Complex ov = inner(pi, pj);
      if (std::abs(ov) > kBranchCutoff)
        pairs.push_back({e.states[i].label, e.states[j].label, ov});
    }
  }
  return pairs;
}

std::vector<OverlapPair> bob_overlap_pairs(const ProductEnsemble& e) {
  return passive_overlap_pairs(e, Party::Alice);
}

std::vector<OverlapPair> alice_overlap_pairs(const ProductEnsemble& e) {
  return passive_overlap_pairs(e, Party::Bob);
}

//============================================================================
// File IO
//============================================================================

namespace {

using json = nlohmann::ordered_json;

json ket_to_json(const Ket& k) {
  json arr = json::array();
  for (int i = 0; i < k.dim(); ++i)
    arr.push_back(json::array({k.amps[i].real(), k.amps[i].imag()}));
  return arr;
}

Ket ket_from_json(const json& arr, int dim, const std::string& where) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != dim)
    throw std::runtime_error(where + ": expected " + std::to_string(dim) +
                             " amplitude pairs");
  Ket k = Ket::zero(dim);
  for (int i = 0; i < dim; ++i) {
    const json& pair = arr[static_cast<std::size_t>(i)];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
      throw std::runtime_error(where + ": amplitude " + std::to_string(i) +
                               " is not a (re, im) pair");
    k.amps[i] = Complex(pair[0].get<double>(), pair[1].get<double>());
  }
  return k;
}

}  // namespace

ProductEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ensemble file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw std::runtime_error("malformed ensemble file " + path + ": " + err.what());
  }
  if (!doc.is_object() || doc.value("format", "") != "loccsim-ensemble")
    throw std::runtime_error(path + ": missing format tag \"loccsim-ensemble\"");
  if (!doc.contains("d_a") || !doc.contains("d_b") || !doc.contains("states"))
    throw std::runtime_error(path + ": required fields d_a, d_b, states");
  const int da = doc["d_a"].get<int>();
  const int db = doc["d_b"].get<int>();
  if (da < 1 || db < 1) throw std::runtime_error(path + ": dimensions must be positive");
  std::vector<std::pair<Ket, Ket>> parts;
  int expect = 1;
  for (const json& s : doc["states"]) {
    const std::string where = path + ": state " + std::to_string(expect);
    if (!s.is_object() || !s.contains("label") || !s.contains("alice") || !s.contains("bob"))
      throw std::runtime_error(where + ": required fields label, alice, bob");
    if (s["label"].get<int>() != expect)
      throw std::runtime_error(where + ": labels must be contiguous from 1, got " +
                               s["label"].dump());
    parts.emplace_back(ket_from_json(s["alice"], da, where + " (alice)"),
                       ket_from_json(s["bob"], db, where + " (bob)"));
    ++expect;
  }
  return make_product_ensemble(da, db, std::move(parts));
}

void save_ensemble(const ProductEnsemble& e, const std::string& path) {
  json doc;
  doc["format"] = "loccsim-ensemble";
  doc["d_a"] = e.dim_a;
  doc["d_b"] = e.dim_b;
  doc["states"] = json::array();
  for (const BipartiteProductState& s : e.states) {
    json st;
    st["label"] = s.label;
    st["alice"] = ket_to_json(s.alice);
    st["bob"] = ket_to_json(s.bob);
    doc["states"].push_back(std::move(st));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ensemble file: " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace locc
