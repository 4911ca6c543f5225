#include "germlab/rootdata.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "germlab/toml_lite.hpp"

namespace germlab {

namespace {

struct TypeName {
  char family;
  int rank;
};

TypeName split_type(const std::string& type) {
  if (type.size() < 2 || !std::isupper(static_cast<unsigned char>(type[0])))
    throw std::invalid_argument("bad Dynkin type '" + type + "'");
  int n = 0;
  try {
    n = std::stoi(type.substr(1));
  } catch (...) {
    throw std::invalid_argument("bad Dynkin type '" + type + "'");
  }
  char f = type[0];
  bool ok = (f == 'A' && n >= 1) || (f == 'B' && n >= 2) || (f == 'C' && n >= 2) || (f == 'D' && n >= 3) ||
            (f == 'E' && n >= 6 && n <= 8) || (f == 'F' && n == 4) || (f == 'G' && n == 2);
  if (!ok) throw std::invalid_argument("unknown Dynkin type '" + type + "'");
  return {f, n};
}

IntMatrix zeros(int n) { return IntMatrix(static_cast<std::size_t>(n), IntVector(static_cast<std::size_t>(n), 0)); }

void bond(IntMatrix& c, int i, int j, int cij = -1, int cji = -1) {
  c[i][j] = cij;
  c[j][i] = cji;
}

// Finite Cartan matrix, Bourbaki numbering from 0. B_n: alpha_{n-1} short; C_n: alpha_{n-1} long.
IntMatrix finite_cartan(const std::string& type) {
  auto [f, n] = split_type(type);
  IntMatrix c = zeros(n);
  for (int i = 0; i < n; ++i) c[i][i] = 2;
  switch (f) {
    case 'A':
      for (int i = 0; i + 1 < n; ++i) bond(c, i, i + 1);
      break;
    case 'B':
      for (int i = 0; i + 2 < n; ++i) bond(c, i, i + 1);
      bond(c, n - 2, n - 1, -2, -1);
      break;
    case 'C':
      for (int i = 0; i + 2 < n; ++i) bond(c, i, i + 1);
      bond(c, n - 2, n - 1, -1, -2);
      break;
    case 'D':
      for (int i = 0; i + 2 < n; ++i) bond(c, i, i + 1);
      bond(c, n - 3, n - 1);
      break;
    case 'E':
      // 1-3-4-5-6(-7-8) with 2 attached to 4 (Bourbaki), shifted to 0-based.
      bond(c, 0, 2);
      bond(c, 2, 3);
      bond(c, 1, 3);
      for (int i = 3; i + 1 < n; ++i) bond(c, i, i + 1);
      break;
    case 'F':
      bond(c, 0, 1);
      bond(c, 1, 2, -2, -1);
      bond(c, 2, 3);
      break;
    case 'G':
      bond(c, 0, 1, -1, -3);
      break;
  }
  return c;
}

std::vector<std::string> split_product(const std::string& type) {
  std::vector<std::string> parts;
  if (type.empty() || type == "T") return parts;
  std::size_t start = 0;
  for (;;) {
    std::size_t x = type.find('x', start);
    parts.push_back(type.substr(start, x - start));
    if (x == std::string::npos) break;
    start = x + 1;
  }
  return parts;
}

IntVector reflect(const IntVector& v, int i, int coefficient) {
  IntVector w = v;
  w[static_cast<std::size_t>(i)] -= coefficient;
  return w;
}

}  // namespace

int RootDatum::pairing(const IntVector& alpha, const IntVector& beta_vee) const {
  int s = 0;
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j) s += beta_vee[i] * cartan[i][j] * alpha[j];
  return s;
}

std::size_t RootDatum::highest_root() const {
  std::size_t best = 0;
  int best_height = INT_MIN;
  for (std::size_t r = 0; r < roots.size(); ++r) {
    int h = std::accumulate(roots[r].begin(), roots[r].end(), 0);
    if (h > best_height) {
      best_height = h;
      best = r;
    }
  }
  return best;
}

bool RootDatum::verify() const {
  std::set<IntVector> root_set(roots.begin(), roots.end());
  for (std::size_t r = 0; r < roots.size(); ++r) {
    if (pairing(roots[r], coroots[r]) != 2) return false;
    for (int i = 0; i < rank; ++i) {
      IntVector simple_vee(static_cast<std::size_t>(rank), 0);
      simple_vee[static_cast<std::size_t>(i)] = 1;
      IntVector image = reflect(roots[r], i, pairing(roots[r], simple_vee));
      if (!root_set.count(image)) return false;
    }
  }
  return true;
}

RootDatum root_datum(const std::string& type) {
  RootDatum d;
  d.components = split_product(type);
  std::vector<IntMatrix> blocks;
  for (const auto& part : d.components) {
    blocks.push_back(finite_cartan(part));
    d.rank += static_cast<int>(blocks.back().size());
  }
  d.cartan = zeros(d.rank);
  int offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) d.cartan[offset + i][offset + j] = b[i][j];
    offset += static_cast<int>(b.size());
  }
  // Orbit of the simple (root, coroot) pairs under simple reflections.
  std::map<IntVector, IntVector> seen;
  std::deque<std::pair<IntVector, IntVector>> queue;
  for (int i = 0; i < d.rank; ++i) {
    IntVector e(static_cast<std::size_t>(d.rank), 0);
    e[static_cast<std::size_t>(i)] = 1;
    queue.emplace_back(e, e);
  }
  while (!queue.empty()) {
    auto [root, coroot] = queue.front();
    queue.pop_front();
    if (seen.count(root)) continue;
    seen[root] = coroot;
    for (int i = 0; i < d.rank; ++i) {
      IntVector e(static_cast<std::size_t>(d.rank), 0);
      e[static_cast<std::size_t>(i)] = 1;
      // s_i(alpha) = alpha - <alpha, alpha_i^vee> alpha_i ; s_i(b^vee) = b^vee - <alpha_i, b^vee> alpha_i^vee
      IntVector r2 = reflect(root, i, d.pairing(root, e));
      IntVector c2 = reflect(coroot, i, d.pairing(e, coroot));
      if (!seen.count(r2)) queue.emplace_back(r2, c2);
    }
  }
  for (const auto& [r, c] : seen) {
    d.roots.push_back(r);
    d.coroots.push_back(c);
  }
  return d;
}

// ---------------------------------------------------------------------------

bool AffineDiagram::is_automorphism(const Permutation& perm) const {
  const int n = node_count();
  if (static_cast<int>(perm.size()) != n) return false;
  std::vector<bool> hit(static_cast<std::size_t>(n), false);
  for (int x : perm) {
    if (x < 0 || x >= n || hit[x]) return false;
    hit[x] = true;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (cartan[perm[i]][perm[j]] != cartan[i][j]) return false;
  return true;
}

namespace {

void extend_automorphisms(const IntMatrix& c, Permutation& perm, std::vector<bool>& used, int next,
                          std::vector<Permutation>& out) {
  const int n = static_cast<int>(c.size());
  if (next == n) {
    out.push_back(perm);
    return;
  }
  for (int img = 0; img < n; ++img) {
    if (used[img]) continue;
    bool ok = c[img][img] == c[next][next];
    for (int j = 0; j < next && ok; ++j) ok = c[perm[j]][img] == c[j][next] && c[img][perm[j]] == c[next][j];
    if (!ok) continue;
    used[img] = true;
    perm[next] = img;
    extend_automorphisms(c, perm, used, next + 1, out);
    used[img] = false;
  }
}

IntMatrix chain(int nodes) {
  IntMatrix c = zeros(nodes);
  for (int i = 0; i < nodes; ++i) c[i][i] = 2;
  for (int i = 0; i + 1 < nodes; ++i) bond(c, i, i + 1);
  return c;
}

IntMatrix untwisted_cartan(const std::string& type) {
  RootDatum d = root_datum(type);
  const std::size_t h = d.highest_root();
  const int n = d.rank + 1;
  IntMatrix c = zeros(n);
  c[0][0] = 2;
  for (int i = 0; i < d.rank; ++i)
    for (int j = 0; j < d.rank; ++j) c[i + 1][j + 1] = d.cartan[i][j];
  for (int j = 0; j < d.rank; ++j) {
    IntVector e(static_cast<std::size_t>(d.rank), 0);
    e[static_cast<std::size_t>(j)] = 1;
    // alpha_0 = delta - theta, alpha_0^vee = K - theta^vee.
    c[0][j + 1] = -d.pairing(e, d.coroots[h]);
    c[j + 1][0] = -d.pairing(d.roots[h], e);
  }
  return c;
}

// Twisted affine matrices, nodes in a chain 0..l unless stated.
IntMatrix twisted_cartan(char family, int n, int e) {
  if (e == 3) {
    IntMatrix c = chain(3);  // D4^(3): 0 - 1 triple 2
    bond(c, 1, 2, -1, -3);
    return c;
  }
  if (family == 'E') {
    IntMatrix c = chain(5);  // E6^(2): 0 - 1 - 2 double 3 - 4
    bond(c, 2, 3, -1, -2);
    return c;
  }
  if (family == 'A' && n == 2) {
    IntMatrix c = chain(2);
    bond(c, 0, 1, -4, -1);
    return c;
  }
  if (family == 'A' && n % 2 == 0) {
    const int l = n / 2;  // A_{2l}^(2): double bonds at both ends, same direction
    IntMatrix c = chain(l + 1);
    bond(c, 0, 1, -2, -1);
    bond(c, l - 1, l, -2, -1);
    return c;
  }
  if (family == 'D' || (family == 'A' && n == 3)) {
    const int l = family == 'D' ? n - 1 : 2;  // D_{l+1}^(2), and A3^(2) = D3^(2)
    IntMatrix c = chain(l + 1);
    bond(c, 0, 1, -1, -2);
    bond(c, l - 1, l, -2, -1);
    return c;
  }
  // A_{2l-1}^(2), l >= 3: nodes 0 and 1 both attached to 2, double bond at the end.
  const int l = (n + 1) / 2;
  IntMatrix c = zeros(l + 1);
  for (int i = 0; i <= l; ++i) c[i][i] = 2;
  bond(c, 0, 2);
  bond(c, 1, 2);
  for (int i = 2; i + 1 < l; ++i) bond(c, i, i + 1);
  bond(c, l - 1, l, -2, -1);
  return c;
}

}  // namespace

AffineDiagram build_affine_diagram(const std::string& type, int e) {
  auto [family, n] = split_type(type);
  AffineDiagram d;
  d.type = type;
  d.e = e;
  if (e == 1) {
    d.cartan = untwisted_cartan(type);
  } else if (e == 2 && ((family == 'A' && n >= 2) || (family == 'D' && n >= 4) || (family == 'E' && n == 6))) {
    d.cartan = twisted_cartan(family, n, e);
  } else if (e == 3 && family == 'D' && n == 4) {
    d.cartan = twisted_cartan(family, n, e);
  } else {
    throw std::invalid_argument("no affine diagram for (" + type + ", e=" + std::to_string(e) + ")");
  }
  Permutation perm(d.cartan.size(), 0);
  std::vector<bool> used(d.cartan.size(), false);
  extend_automorphisms(d.cartan, perm, used, 0, d.automorphisms);
  return d;
}

std::vector<std::vector<int>> node_orbits(const AffineDiagram& d, const std::vector<Permutation>& action) {
  for (const auto& perm : action)
    if (!d.is_automorphism(perm)) throw std::invalid_argument("action is not a diagram automorphism");
  const int n = d.node_count();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& perm : action)
    for (int i = 0; i < n; ++i) {
      int a = find(i), b = find(perm[i]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups) out.push_back(members);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

bool cyclic_subgroup(const FiniteGroup& g, const std::vector<int>& members, int& generator) {
  std::set<int> target(members.begin(), members.end());
  for (int x : members) {
    std::set<int> gen;
    int y = 0;
    do {
      gen.insert(y);
      y = g.mul(y, x);
    } while (y != 0 && gen.size() <= target.size());
    if (gen == target) {
      generator = x;
      return true;
    }
  }
  return false;
}

}  // namespace

void FixedChoices::validate() const {
  const int n = sigma.order();
  if (n == 0) throw std::invalid_argument("Sigma is empty");
  for (const auto& row : sigma.table)
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("Sigma table is not square");
  for (int a = 0; a < n; ++a) {
    if (sigma.mul(0, a) != a || sigma.mul(a, 0) != a) throw std::invalid_argument("element 0 is not the identity");
    std::set<int> row(sigma.table[a].begin(), sigma.table[a].end());
    if (static_cast<int>(row.size()) != n || *row.begin() < 0 || *row.rbegin() >= n)
      throw std::invalid_argument("Sigma table is not a Latin square");
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (sigma.mul(sigma.mul(a, b), c) != sigma.mul(a, sigma.mul(b, c)))
          throw std::invalid_argument("Sigma table is not associative");
  }
  std::set<int> inertia(sigma.inertia.begin(), sigma.inertia.end());
  if (!inertia.count(0)) throw std::invalid_argument("Sigma^t must contain the identity");
  for (int a : inertia)
    for (int b : inertia)
      if (!inertia.count(sigma.mul(a, b))) throw std::invalid_argument("Sigma^t is not a subgroup");
  for (int g = 0; g < n; ++g) {
    int ginv = 0;
    while (sigma.mul(g, ginv) != 0) ++ginv;
    for (int a : inertia)
      if (!inertia.count(sigma.mul(sigma.mul(g, a), ginv))) throw std::invalid_argument("Sigma^t is not normal");
  }
  int gen = 0;
  if (!cyclic_subgroup(sigma, sigma.inertia, gen)) throw std::invalid_argument("Sigma^t is not cyclic");
  // Sigma / Sigma^t must be generated by the coset of qFr.
  std::set<int> reached;
  int y = 0;
  for (int step = 0; step <= n; ++step) {
    for (int a : inertia) reached.insert(sigma.mul(y, a));
    y = sigma.mul(y, sigma.qfr);
  }
  if (static_cast<int>(reached.size()) != n) throw std::invalid_argument("qFr does not generate Sigma/Sigma^t");
  for (const Component& c : components) {
    if (static_cast<int>(c.action.size()) != n)
      throw std::invalid_argument("component " + c.name + ": one permutation per element of Sigma required");
    for (const auto& perm : c.action)
      if (!c.diagram.is_automorphism(perm))
        throw std::invalid_argument("component " + c.name + ": action is not a diagram automorphism");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const auto& pa = c.action[a];
        const auto& pb = c.action[b];
        const auto& pab = c.action[sigma.mul(a, b)];
        for (int i = 0; i < c.diagram.node_count(); ++i)
          if (pab[i] != pa[pb[i]]) throw std::invalid_argument("component " + c.name + ": action is not a homomorphism");
      }
  }
}

FixedChoices load_fixed_choices(const nlohmann::json& doc) {
  FixedChoices fc;
  const auto& sg = doc.at("sigma");
  fc.sigma.table = sg.at("table").get<IntMatrix>();
  fc.sigma.inertia = sg.value("inertia", std::vector<int>{0});
  fc.sigma.qfr = sg.value("qfr", 0);
  for (const auto& c : doc.at("component")) {
    Component comp;
    comp.name = c.value("name", "tau" + std::to_string(fc.components.size() + 1));
    comp.diagram = build_affine_diagram(c.at("type").get<std::string>(), c.value("e", 1));
    if (c.contains("action")) {
      comp.action = c.at("action").get<std::vector<Permutation>>();
    } else {
      Permutation id(static_cast<std::size_t>(comp.diagram.node_count()));
      std::iota(id.begin(), id.end(), 0);
      comp.action.assign(static_cast<std::size_t>(fc.sigma.order()), id);
    }
    fc.components.push_back(std::move(comp));
  }
  fc.validate();
  return fc;
}

FixedChoices load_fixed_choices(const std::filesystem::path& toml_path) {
  return load_fixed_choices(load_toml(toml_path));
}

FixedChoices split_fixed_choices(const std::vector<std::string>& types) {
  FixedChoices fc;
  fc.sigma.table = {{0}};
  fc.sigma.inertia = {0};
  for (std::size_t i = 0; i < types.size(); ++i) {
    Component comp;
    comp.name = "tau" + std::to_string(i + 1);
    comp.diagram = build_affine_diagram(types[i], 1);
    Permutation id(static_cast<std::size_t>(comp.diagram.node_count()));
    std::iota(id.begin(), id.end(), 0);
    comp.action = {id};
    fc.components.push_back(std::move(comp));
  }
  fc.validate();
  return fc;
}

ParahoricIndexSet parahoric_index_set(const FixedChoices& fc, bool rectangles) {
  ParahoricIndexSet out;
  out.rectangles = rectangles;
  for (const auto& c : fc.components) out.factor_orbits.push_back(node_orbits(c.diagram, c.action));
  out.s = {{}};
  for (const auto& orbits : out.factor_orbits) {
    std::vector<OrbitTuple> next;
    for (const auto& prefix : out.s)
      for (std::size_t k = 0; k < orbits.size(); ++k) {
        OrbitTuple t = prefix;
        t.push_back(static_cast<int>(k));
        next.push_back(t);
      }
    out.s = next;
  }
  const std::size_t m = out.s.size();
  if (m > 20) throw std::out_of_range("parahoric index set too large to enumerate");
  for (unsigned long mask = 1; mask < (1UL << m); ++mask) {
    std::vector<int> subset;
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (1UL << i)) subset.push_back(static_cast<int>(i));
    if (rectangles) {
      // Rectangle iff it equals the product of its projections.
      std::vector<std::set<int>> proj(out.factor_orbits.size());
      for (int i : subset)
        for (std::size_t f = 0; f < proj.size(); ++f) proj[f].insert(out.s[i][f]);
      std::size_t product = 1;
      for (const auto& pr : proj) product *= pr.size();
      if (product != subset.size()) continue;
    }
    out.f.push_back(subset);
  }
  // Order by size, then lexicographically, so singletons (vertices) come first.
  std::stable_sort(out.f.begin(), out.f.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return out;
}

nlohmann::json ParahoricIndexSet::to_json() const {
  nlohmann::json j;
  j["reading"] = rectangles ? "rectangles" : "literal";
  j["factor_orbits"] = factor_orbits;
  j["S"] = s;
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& subset : f) {
    nlohmann::json elems = nlohmann::json::array();
    for (int i : subset) elems.push_back(s[i]);
    fs.push_back(elems);
  }
  j["F"] = fs;
  j["size"] = f.size();
  return j;
}

long nilpotent_class_bound(const RootDatum& datum, int p) {
  if (p < 3 || p % 2 == 0) throw std::out_of_range("nilpotent_class_bound needs an odd prime");
  if (datum.rank == 0) return 1;
  long bound = 1;
  for (const auto& c : datum.components) {
    if (c != "A1") throw std::out_of_range("nilpotent_class_bound: type " + c + " is outside the table");
    bound *= 5;  // zero orbit plus one regular orbit per square class
  }
  return bound;
}

}  // namespace germlab
