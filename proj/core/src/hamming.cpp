#include "robenv/hamming.hpp"

#include <bit>
#include <cmath>
#include <deque>
#include <string>

#include "robenv/error.hpp"
#include "robenv/exactmath.hpp"

namespace robenv {

void GraphParams::validate() const {
  if (dims < 1 || alphabet < 2) throw Error(ErrorCode::InvalidArgument, "need dims >= 1 and alphabet >= 2");
  std::uint64_t v = 1;
  for (int i = 0; i < dims; ++i) {
    v *= static_cast<std::uint64_t>(alphabet);
    if (v > kMaxMaterializedVertices) {
      throw Error(ErrorCode::SpaceTooLarge, "H(" + std::to_string(dims) + "," + std::to_string(alphabet) +
                                                ") exceeds the materialization cap");
    }
  }
}

std::uint64_t GraphParams::vertex_count() const {
  validate();
  std::uint64_t v = 1;
  for (int i = 0; i < dims; ++i) v *= static_cast<std::uint64_t>(alphabet);
  return v;
}

std::uint64_t GraphParams::stride(int coordinate) const {
  std::uint64_t s = 1;
  for (int i = coordinate + 1; i < dims; ++i) s *= static_cast<std::uint64_t>(alphabet);
  return s;
}

HammingSubset::HammingSubset(GraphParams graph)
    : graph_(graph), vertex_count_(graph.vertex_count()), words_((vertex_count_ + 63) / 64, 0) {}

HammingSubset HammingSubset::full(GraphParams graph) {
  HammingSubset s(graph);
  for (auto& w : s.words_) w = ~std::uint64_t{0};
  s.clear_padding();
  return s;
}

HammingSubset HammingSubset::from_vertices(GraphParams graph, std::span<const std::uint64_t> vertices) {
  HammingSubset s(graph);
  for (auto v : vertices) {
    if (v >= s.vertex_count_) throw Error(ErrorCode::InvalidArgument, "vertex out of range");
    s.insert(v);
  }
  return s;
}

HammingSubset HammingSubset::from_mask(GraphParams graph, std::uint64_t mask) {
  HammingSubset s(graph);
  if (s.vertex_count_ > 64) throw Error(ErrorCode::InvalidArgument, "mask construction needs <= 64 vertices");
  s.words_[0] = mask;
  s.clear_padding();
  return s;
}

void HammingSubset::clear_padding() {
  const std::uint64_t tail = vertex_count_ & 63;
  if (tail != 0) words_.back() &= (std::uint64_t{1} << tail) - 1;
}

std::uint64_t HammingSubset::count() const {
  std::uint64_t c = 0;
  for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
  return c;
}

std::vector<std::uint64_t> HammingSubset::members() const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = 0; v < vertex_count_; ++v) {
    if (contains(v)) out.push_back(v);
  }
  return out;
}

HammingSubset HammingSubset::complement() const {
  HammingSubset out = *this;
  for (auto& w : out.words_) w = ~w;
  out.clear_padding();
  return out;
}

bool HammingSubset::is_subset_of(const HammingSubset& other) const {
  if (!(graph_ == other.graph_)) throw Error(ErrorCode::ShapeMismatch, "subsets of different graphs");
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~other.words_[i]) return false;
  }
  return true;
}

std::vector<int> vertex_word(const GraphParams& graph, std::uint64_t v) {
  std::vector<int> word(static_cast<std::size_t>(graph.dims));
  for (int i = graph.dims - 1; i >= 0; --i) {
    word[static_cast<std::size_t>(i)] = static_cast<int>(v % static_cast<std::uint64_t>(graph.alphabet));
    v /= static_cast<std::uint64_t>(graph.alphabet);
  }
  return word;
}

std::uint64_t vertex_of(const GraphParams& graph, std::span<const int> word) {
  if (word.size() != static_cast<std::size_t>(graph.dims)) throw Error(ErrorCode::ShapeMismatch, "word length");
  std::uint64_t v = 0;
  for (int d : word) {
    if (d < 0 || d >= graph.alphabet) throw Error(ErrorCode::InvalidArgument, "letter outside alphabet");
    v = v * static_cast<std::uint64_t>(graph.alphabet) + static_cast<std::uint64_t>(d);
  }
  return v;
}

int hamming_distance(const GraphParams& graph, std::uint64_t u, std::uint64_t v) {
  const auto q = static_cast<std::uint64_t>(graph.alphabet);
  int d = 0;
  for (int i = 0; i < graph.dims; ++i) {
    d += (u % q) != (v % q);
    u /= q;
    v /= q;
  }
  return d;
}

namespace {

// Bits whose index has a zero at position k, for k < 6.
constexpr std::uint64_t kLowHalf[6] = {0x5555555555555555ull, 0x3333333333333333ull, 0x0f0f0f0f0f0f0f0full,
                                       0x00ff00ff00ff00ffull, 0x0000ffff0000ffffull, 0x00000000ffffffffull};

}  // namespace

HammingSubset expand(const HammingSubset& s) {
  const GraphParams& g = s.graph();
  const auto q = static_cast<std::uint64_t>(g.alphabet);
  const std::uint64_t total = s.vertex_count();
  HammingSubset out(g);
  if (q == 2) {
    // Binary alphabet: Exp(S) is S together with each single-bit flip of S.
    const auto& in = s.words_;
    auto& w = out.words_;
    w = in;
    for (int k = 0; k < g.dims; ++k) {
      if (k < 6) {
        const std::uint64_t m = kLowHalf[k];
        const int sh = 1 << k;
        for (std::size_t i = 0; i < in.size(); ++i) w[i] |= ((in[i] & m) << sh) | ((in[i] >> sh) & m);
      } else {
        const std::size_t hop = std::size_t{1} << (k - 6);
        for (std::size_t i = 0; i < in.size(); ++i) w[i] |= in[i ^ hop];
      }
    }
    return out;
  }
  // v is in Exp(S) iff some coordinate line through v meets S.
  for (int j = 0; j < g.dims; ++j) {
    const std::uint64_t stride = g.stride(j);
    const std::uint64_t block = stride * q;
    for (std::uint64_t base = 0; base < total; base += block) {
      for (std::uint64_t lo = 0; lo < stride; ++lo) {
        const std::uint64_t start = base + lo;
        bool hit = false;
        for (std::uint64_t t = 0; t < q && !hit; ++t) hit = s.contains(start + t * stride);
        if (!hit) continue;
        for (std::uint64_t t = 0; t < q; ++t) out.insert(start + t * stride);
      }
    }
  }
  return out;
}

HammingSubset expand_by_neighbors(const HammingSubset& s) {
  const GraphParams& g = s.graph();
  const auto q = static_cast<std::uint64_t>(g.alphabet);
  HammingSubset out(g);
  for (std::uint64_t v = 0; v < s.vertex_count(); ++v) {
    bool in = s.contains(v);
    for (int j = 0; j < g.dims && !in; ++j) {
      const std::uint64_t stride = g.stride(j);
      const std::uint64_t digit = (v / stride) % q;
      for (std::uint64_t d = 0; d < q && !in; ++d) {
        if (d == digit) continue;
        in = s.contains(v - digit * stride + d * stride);
      }
    }
    if (in) out.insert(v);
  }
  return out;
}

HammingSubset expand_k(const HammingSubset& s, long k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "expansion radius must be >= 0");
  HammingSubset cur = s;
  for (long i = 0; i < k; ++i) {
    HammingSubset next = expand(cur);
    if (next == cur) break;  // fixed point
    cur = std::move(next);
  }
  return cur;
}

std::vector<int> distance_to_set(const HammingSubset& target) {
  const GraphParams& g = target.graph();
  const auto q = static_cast<std::uint64_t>(g.alphabet);
  const std::uint64_t total = target.vertex_count();
  std::vector<int> dist(total, -1);
  std::vector<std::uint64_t> frontier;
  for (std::uint64_t v = 0; v < total; ++v) {
    if (target.contains(v)) {
      dist[v] = 0;
      frontier.push_back(v);
    }
  }
  std::vector<std::uint64_t> next;
  for (int level = 1; !frontier.empty(); ++level) {
    next.clear();
    for (auto v : frontier) {
      for (int j = 0; j < g.dims; ++j) {
        const std::uint64_t stride = g.stride(j);
        const std::uint64_t digit = (v / stride) % q;
        for (std::uint64_t d = 0; d < q; ++d) {
          if (d == digit) continue;
          const std::uint64_t u = v - digit * stride + d * stride;
          if (dist[u] < 0) {
            dist[u] = level;
            next.push_back(u);
          }
        }
      }
    }
    frontier.swap(next);
  }
  return dist;
}

HammingSubset interior_k(const HammingSubset& s, long k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "interior radius must be >= 0");
  const std::vector<int> dist = distance_to_set(s.complement());
  HammingSubset out(s.graph());
  for (std::uint64_t v = 0; v < s.vertex_count(); ++v) {
    // dist < 0 means the complement is empty, so every ball stays inside.
    if (s.contains(v) && (dist[v] < 0 || dist[v] > k)) out.insert(v);
  }
  return out;
}

namespace {

void require_interesting(const HammingSubset& s) {
  const std::uint64_t size = s.count();
  if (size == 0 || 2 * size > s.vertex_count()) {
    throw Error(ErrorCode::NotInterestingSubset,
                "|S| = " + std::to_string(size) + " of " + std::to_string(s.vertex_count()));
  }
}

HamgraphCheck hamgraph_from_distances(const HammingSubset& s, const std::vector<int>& dist, double c) {
  if (!(c > 0)) throw Error(ErrorCode::InvalidArgument, "c must be positive");
  HamgraphCheck out;
  // Path lengths are integers, so "c sqrt(n) + 2 edges or less" is the floor.
  out.radius = floor_scaled_sqrt(c, static_cast<unsigned long long>(s.graph().dims)) + 2;
  std::uint64_t kept = 0;
  for (std::uint64_t v = 0; v < s.vertex_count(); ++v) {
    if (s.contains(v) && (dist[v] < 0 || dist[v] > out.radius)) ++kept;
  }
  out.ratio = make_rational(BigInt(static_cast<unsigned long>(kept)), BigInt(static_cast<unsigned long>(s.count())));
  const ExactRational cq = exact_from_double(c);
  out.bound = scale_enclosure(exp_enclosure(-2 * cq * cq), ExactRational(2));
  switch (less_than(out.ratio, out.bound)) {
    case Verdict::Holds: out.holds = true; break;
    case Verdict::Fails: out.holds = false; break;
    case Verdict::Undecided:
      throw Error(ErrorCode::PrecisionInsufficient, "interior ratio within rounding of 2exp(-2c^2)");
  }
  return out;
}

}  // namespace

HamgraphCheck check_hamgraph_theorem(const HammingSubset& s, double c) {
  require_interesting(s);
  return hamgraph_from_distances(s, distance_to_set(s.complement()), c);
}

std::vector<HamgraphCheck> check_hamgraph_theorem(const HammingSubset& s, std::span<const double> c_grid) {
  require_interesting(s);
  const std::vector<int> dist = distance_to_set(s.complement());
  std::vector<HamgraphCheck> out;
  out.reserve(c_grid.size());
  for (double c : c_grid) out.push_back(hamgraph_from_distances(s, dist, c));
  return out;
}

HarperChecker::HarperChecker(GraphParams graph, long k, double tol) : graph_(graph), k_(k), tol_(tol) {
  graph_.validate();
  if (k < 1 || k >= graph.dims) throw Error(ErrorCode::InvalidArgument, "need 1 <= k < dims");
}

HarperCheck HarperChecker::check(const HammingSubset& s) {
  if (!(s.graph() == graph_)) throw Error(ErrorCode::ShapeMismatch, "subset from another graph");
  const std::uint64_t size = s.count();
  const std::uint64_t total = s.vertex_count();
  if (size == 0 || size == total) {
    throw Error(ErrorCode::PreconditionViolated, "harper check needs a proper nonempty subset");
  }
  auto it = rhs_by_size_.find(size);
  if (it == rhs_by_size_.end()) {
    const ExactRational frac = make_rational(BigInt(static_cast<unsigned long>(size)),
                                             BigInt(static_cast<unsigned long>(total)));
    HarperRhs rhs = harper_rhs_detail(graph_.dims, k_, frac, tol_);
    it = rhs_by_size_.emplace(size, std::make_pair(rhs.value, rhs.argmin_r)).first;
  }
  HarperCheck out;
  out.lhs = make_rational(BigInt(static_cast<unsigned long>(expand_k(s, k_).count())),
                          BigInt(static_cast<unsigned long>(total)));
  out.rhs = it->second.first;
  out.argmin_r = it->second.second;
  out.holds = to_real(out.lhs) >= out.rhs - Real(tol_);
  return out;
}

HarperCheck harper_check(const HammingSubset& s, long k, double tol) {
  return HarperChecker(s.graph(), k, tol).check(s);
}

ImageBijection::ImageBijection(const SpaceParams& params)
    : space_(params),
      graph_{static_cast<int>(params.dimension()), static_cast<int>(params.level_count())} {
  params.validate();
}

std::uint64_t ImageBijection::to_vertex(const ImageTensor& image) const {
  if (!(image.params() == space_)) throw Error(ErrorCode::ShapeMismatch, "image from another space");
  return image_index(image);
}

ImageBijection image_bijection(const SpaceParams& params) { return ImageBijection(params); }

}  // namespace robenv
