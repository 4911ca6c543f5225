#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace germlab {

using IntMatrix = std::vector<std::vector<int>>;
using IntVector = std::vector<int>;
/// perm[i] is the image of node i.
using Permutation = std::vector<int>;

/// Root datum of a (possibly reducible) finite type, in simple-root
/// coordinates. Characters and cocharacters are taken with the standard
/// bases of Z^rank (root lattice and its dual).
struct RootDatum {
  int rank = 0;
  /// cartan[i][j] = <alpha_i^vee, alpha_j>.
  IntMatrix cartan;
  /// roots[r] and coroots[r] correspond (coroots in simple-coroot coordinates).
  std::vector<IntVector> roots;
  std::vector<IntVector> coroots;
  /// Simple components, e.g. {"A1", "A1"}.
  std::vector<std::string> components;

  /// <alpha, beta^vee>.
  int pairing(const IntVector& alpha, const IntVector& beta_vee) const;
  /// Root of maximal height; requires an irreducible datum.
  std::size_t highest_root() const;
  /// Checks <alpha, alpha^vee> = 2 and closure under simple reflections.
  bool verify() const;
};

/// "A1", "B3", "G2", ... ; "A1xA1" for products; "" or "T" for rank 0.
RootDatum root_datum(const std::string& type);

struct AffineDiagram {
  std::string type;  ///< e.g. "A3"
  int e = 1;         ///< 1, 2 or 3
  /// Generalized Cartan matrix on nodes 0..l; node 0 is the extended node.
  IntMatrix cartan;
  /// All node permutations preserving the Cartan matrix.
  std::vector<Permutation> automorphisms;

  int node_count() const { return static_cast<int>(cartan.size()); }
  bool is_automorphism(const Permutation& perm) const;
};

/// (type, e) must be a legal pair: e = 1 for every type, e = 2 for A_n (n >= 2),
/// D_n (n >= 4) and E6, e = 3 for D4.
AffineDiagram build_affine_diagram(const std::string& type, int e);

/// Orbits of the group generated by the given automorphisms, each sorted,
/// listed by smallest node.
std::vector<std::vector<int>> node_orbits(const AffineDiagram& d, const std::vector<Permutation>& action);

/// Sigma as an explicit multiplication table on 0..n-1 (0 is the identity),
/// the inertia subgroup Sigma^t and the chosen generator qFr of Sigma/Sigma^t.
struct FiniteGroup {
  IntMatrix table;
  std::vector<int> inertia;
  int qfr = 0;

  int order() const { return static_cast<int>(table.size()); }
  int mul(int a, int b) const { return table[a][b]; }
};

struct Component {
  std::string name;
  AffineDiagram diagram;
  /// phi_tau(sigma) for every sigma in Sigma, in table order.
  std::vector<Permutation> action;
};

struct FixedChoices {
  FiniteGroup sigma;
  /// One representative per component orbit.
  std::vector<Component> components;

  /// Group axioms, cyclicity of Sigma^t and Sigma/Sigma^t, and that each
  /// action is a homomorphism into the diagram automorphisms. Throws on failure.
  void validate() const;
};

FixedChoices load_fixed_choices(const nlohmann::json& doc);
FixedChoices load_fixed_choices(const std::filesystem::path& toml_path);
/// Split form with trivial Sigma, one factor per listed type (e = 1).
FixedChoices split_fixed_choices(const std::vector<std::string>& types);

/// An element of S: one node orbit index per component.
using OrbitTuple = std::vector<int>;

struct ParahoricIndexSet {
  /// Per component, its node orbits.
  std::vector<std::vector<std::vector<int>>> factor_orbits;
  /// S as the product of the orbit index sets, lexicographic.
  std::vector<OrbitTuple> s;
  /// Each element is a set of indices into s.
  std::vector<std::vector<int>> f;
  bool rectangles = false;

  nlohmann::json to_json() const;
};

/// Literal reading: all nonempty subsets of S (every projection is then
/// nonempty). With rectangles = true, only products of nonempty subsets of
/// the factors.
ParahoricIndexSet parahoric_index_set(const FixedChoices& fc, bool rectangles = false);

/// Number of nilpotent classes over F for the supported table: rank 0 -> 1,
/// A1^n -> 5^n for odd p. Throws std::out_of_range otherwise.
long nilpotent_class_bound(const RootDatum& datum, int p);

}  // namespace germlab
