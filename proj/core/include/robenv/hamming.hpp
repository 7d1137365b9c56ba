#pragma once

// Hamming graphs H(n, q) with materialized vertex subsets.
//
// Vertex v encodes the word (d_0, ..., d_{n-1}) as sum d_i q^(n-1-i), the
// same digit order image indices use, so the image bijection is the identity
// on indices.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "robenv/image_space.hpp"
#include "robenv/real.hpp"

namespace robenv {

inline constexpr std::uint64_t kMaxMaterializedVertices = std::uint64_t{1} << 26;

struct GraphParams {
  int dims = 1;      // word length n
  int alphabet = 2;  // q

  // Throws SpaceTooLarge past kMaxMaterializedVertices.
  void validate() const;
  std::uint64_t vertex_count() const;
  std::uint64_t stride(int coordinate) const;  // q^(dims-1-coordinate)

  friend bool operator==(const GraphParams&, const GraphParams&) = default;
};

class HammingSubset {
 public:
  explicit HammingSubset(GraphParams graph);

  static HammingSubset full(GraphParams graph);
  static HammingSubset from_vertices(GraphParams graph, std::span<const std::uint64_t> vertices);
  // Bit v of mask selects vertex v; graphs with at most 64 vertices.
  static HammingSubset from_mask(GraphParams graph, std::uint64_t mask);

  const GraphParams& graph() const { return graph_; }
  std::uint64_t vertex_count() const { return vertex_count_; }

  bool contains(std::uint64_t v) const { return (words_[v >> 6] >> (v & 63)) & 1u; }
  void insert(std::uint64_t v) { words_[v >> 6] |= std::uint64_t{1} << (v & 63); }
  void erase(std::uint64_t v) { words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }

  std::uint64_t count() const;
  bool empty() const { return count() == 0; }
  std::vector<std::uint64_t> members() const;

  HammingSubset complement() const;
  bool is_subset_of(const HammingSubset& other) const;

  friend bool operator==(const HammingSubset&, const HammingSubset&) = default;

 private:
  friend HammingSubset expand(const HammingSubset& s);
  void clear_padding();

  GraphParams graph_;
  std::uint64_t vertex_count_;
  std::vector<std::uint64_t> words_;
};

std::vector<int> vertex_word(const GraphParams& graph, std::uint64_t v);
std::uint64_t vertex_of(const GraphParams& graph, std::span<const int> word);
int hamming_distance(const GraphParams& graph, std::uint64_t u, std::uint64_t v);

// Closed neighbourhood, by OR-folding each coordinate line.
HammingSubset expand(const HammingSubset& s);
// Same set via a per-vertex neighbour scan; kept as a cross-check.
HammingSubset expand_by_neighbors(const HammingSubset& s);
HammingSubset expand_k(const HammingSubset& s, long k);

// Graph distance from every vertex to the nearest member of target
// (-1 everywhere when target is empty).
std::vector<int> distance_to_set(const HammingSubset& target);

// Members of s whose distance-k ball stays inside s.
HammingSubset interior_k(const HammingSubset& s, long k);

struct HamgraphCheck {
  long radius = 0;       // floor(c sqrt(dims) + 2)
  ExactRational ratio;   // |interior| / |s|
  Enclosure bound;       // 2 exp(-2 c^2)
  bool holds = false;    // ratio < bound
};

// Requires 1 <= |s| <= q^dims / 2 and c > 0.
HamgraphCheck check_hamgraph_theorem(const HammingSubset& s, double c);
// One distance sweep shared across a grid of c values.
std::vector<HamgraphCheck> check_hamgraph_theorem(const HammingSubset& s, std::span<const double> c_grid);

struct HarperCheck {
  ExactRational lhs;  // |Exp^k(s)| / q^dims
  Real rhs;
  long argmin_r = -1;
  bool holds = false;  // lhs >= rhs - tol
};

// Caches the right-hand side per subset size so exhaustive sweeps evaluate
// the tail equation once per |s|.
class HarperChecker {
 public:
  HarperChecker(GraphParams graph, long k, double tol);
  HarperCheck check(const HammingSubset& s);

 private:
  GraphParams graph_;
  long k_;
  double tol_;
  std::map<std::uint64_t, std::pair<Real, long>> rhs_by_size_;
};

HarperCheck harper_check(const HammingSubset& s, long k, double tol);

// V(H(n^2 h, 2^b)) <-> I_{n,h,b}; graph distance equals L0 image distance.
class ImageBijection {
 public:
  explicit ImageBijection(const SpaceParams& params);

  const GraphParams& graph() const { return graph_; }
  const SpaceParams& space() const { return space_; }
  ImageTensor to_image(std::uint64_t vertex) const { return image_at(space_, vertex); }
  std::uint64_t to_vertex(const ImageTensor& image) const;

 private:
  SpaceParams space_;
  GraphParams graph_;
};

ImageBijection image_bijection(const SpaceParams& params);

}  // namespace robenv
