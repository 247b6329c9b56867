#pragma once

// Shift spaces presented by labeled graphs: SFTs from forbidden blocks, vertex
// shifts, sofic shifts and spacing shifts.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ellis {

using Word = std::string;
__extension__ typedef __int128 Count;

std::string count_to_string(Count c);

struct LabeledEdge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  char label = 0;
  friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

/// Essential (trimmed) right-resolving labeled graph.
struct Presentation {
  std::size_t states = 0;
  std::vector<LabeledEdge> edges;
  std::vector<std::string> state_names;

  /// Adjacency matrix counting parallel edges.
  std::vector<std::vector<std::uint64_t>> adjacency() const;
  /// successor of s along label a, if any
  std::optional<std::uint32_t> follow(std::uint32_t s, char a) const;

  std::vector<std::vector<std::pair<char, std::uint32_t>>> out;  // filled by finalize()
  void finalize();
};

enum class ShiftKind { forbidden_blocks, edge_graph, labeled_graph, spacing };

struct SpacingSpec {
  std::vector<long long> gaps;  // allowed gap lengths up to cutoff
  long long cutoff = 0;
};

class Subshift {
 public:
  static Subshift forbidden_blocks(std::string alphabet, std::vector<Word> forbidden);
  /// Vertex shift; symbol i of the alphabet names vertex i.
  static Subshift edge_graph(std::string alphabet, std::vector<std::vector<int>> matrix);
  static Subshift labeled_graph(std::string alphabet, std::size_t states, std::vector<LabeledEdge> edges);
  /// Gaps between consecutive 1s restricted to `spec.gaps` up to the cutoff; longer gaps free.
  static Subshift spacing(SpacingSpec spec);

  static Subshift full_shift(int symbols);
  static Subshift golden_mean();
  static Subshift even_shift();

  ShiftKind kind() const noexcept { return kind_; }
  bool is_finite_type() const noexcept { return kind_ != ShiftKind::labeled_graph; }
  const std::string& alphabet() const noexcept { return alphabet_; }
  const std::vector<Word>& forbidden() const noexcept { return forbidden_; }
  const Presentation& presentation() const noexcept { return pres_; }
  /// Block length of the defining forbidden list (2 for vertex shifts); 0 for sofic shifts.
  std::size_t block_length() const noexcept { return block_length_; }
  bool input_right_resolving() const noexcept { return input_right_resolving_; }
  const std::optional<SpacingSpec>& spacing_spec() const noexcept { return spacing_; }
  const std::string& description() const noexcept { return description_; }

  bool contains(const Word& w) const;

  nlohmann::json to_json() const;

 private:
  ShiftKind kind_ = ShiftKind::forbidden_blocks;
  std::string alphabet_;
  std::vector<Word> forbidden_;
  std::size_t block_length_ = 0;
  bool input_right_resolving_ = true;
  std::optional<SpacingSpec> spacing_;
  Presentation pres_;
  std::string description_;
  nlohmann::json source_;
};

/// Parses {alphabet, kind, forbidden | matrix | labeled_edges | spacing}.
Subshift build_subshift(const nlohmann::json& spec);

/// Sorted n-blocks.
std::vector<Word> language(const Subshift& shift, std::size_t n);
/// |B_n| by subset dynamic programming on the presentation.
Count count_words(const Subshift& shift, std::size_t n);
/// |B_n| = 1^T A^{n-L+1} 1 on the higher-block graph; finite-type shifts with n >= L-1 only.
Count transfer_count(const Subshift& shift, std::size_t n);

struct SpectralEstimate {
  double radius = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool reducible = false;
};

/// Perron root by power iteration on A+I with Collatz-Wielandt bounds.
SpectralEstimate spectral_radius(const std::vector<std::vector<std::uint64_t>>& a,
                                 double rel_tol = 1e-10, std::size_t max_iter = 2000000);

struct EntropyRow {
  std::size_t n = 0;
  Count words = 0;
  double per_symbol = 0.0;  // log|B_n| / n
};

struct EntropyReport {
  std::vector<EntropyRow> rows;
  double spectral = 0.0;
  SpectralEstimate estimate;
  double limit_estimate = 0.0;  // log(|B_n| / |B_{n-1}|) at n_max
  bool per_symbol_nonincreasing = true;
  bool reducible_warning = false;
};

EntropyReport entropy_estimates(const Subshift& shift, std::size_t n_max);
double spectral_entropy(const Subshift& shift);

struct Classification {
  bool irreducible = false;
  bool mixing = false;
  long long period = 0;
  std::size_t components = 0;
};

Classification classify_sft(const Subshift& shift);

struct PeriodicSpectrum {
  std::map<std::size_t, Count> fixed_by;   // |{x : sigma^n x = x}|
  std::map<std::size_t, Count> least;      // points of least period n
  std::map<std::size_t, Count> orbits;     // orbits of least period n
  std::string method;
};

PeriodicSpectrum periodic_spectrum(const Subshift& shift, std::size_t n_max);

struct BoyleReport {
  bool per_divides = false;
  double entropy_gap = 0.0;
  bool hypotheses_hold = false;
  std::vector<std::size_t> x_periods;
  std::vector<std::size_t> y_periods;
  std::vector<std::size_t> undivided;  // X periods with no dividing Y period
};

BoyleReport boyle_precondition(const Subshift& x, const Subshift& y, std::size_t n_max);

struct SlidingBlockCode {
  std::size_t memory = 0;
  std::size_t anticipation = 0;
  std::map<Word, char> rule;

  std::size_t window() const noexcept { return memory + anticipation + 1; }
};

Word apply_block_code(const SlidingBlockCode& code, const Word& word);
bool verify_factor(const SlidingBlockCode& code, const Subshift& domain, const Subshift& codomain,
                   std::size_t n);
SlidingBlockCode golden_to_even_code();
SlidingBlockCode identity_code(const std::string& alphabet);

struct CylinderDistance {
  double distance = 0.0;
  long long k = 0;  // largest k with agreement on [-k, k]; -1 if the centres differ
  bool indistinguishable = false;
};

/// Distance between two central blocks; equal windows give 0 and the flag.
CylinderDistance cylinder_metric(const Word& x, const Word& y);

/// {n in [1, horizon] : sigma^n[u] meets [v]} for cylinders anchored at coordinate 0.
std::vector<long long> cylinder_hitting_set(const Subshift& shift, const Word& u, const Word& v,
                                            long long horizon);

}  // namespace ellis
