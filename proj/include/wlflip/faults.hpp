#pragma once

#include "wlflip/graph.hpp"
#include "wlflip/nn.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wlflip {

// binary32 layout: bit 31 sign, bits 30..23 exponent, bits 22..0 mantissa.
enum class BitField { Sign, Exponent, Mantissa };

const char* to_string(BitField f);
BitField parse_bit_field(const std::string& s);

constexpr int field_high_bit(BitField f) { return f == BitField::Sign ? 31 : f == BitField::Exponent ? 30 : 22; }
constexpr int field_low_bit(BitField f) { return f == BitField::Sign ? 31 : f == BitField::Exponent ? 23 : 0; }
constexpr BitField field_of_bit(int bit) {
  return bit == 31 ? BitField::Sign : bit >= 23 ? BitField::Exponent : BitField::Mantissa;
}

/// The bit value a directional flip in `f` starts from: sign 0 -> 1,
/// exponent and mantissa 1 -> 0.
constexpr int eligible_value(BitField f) { return f == BitField::Sign ? 0 : 1; }

struct BitAddress {
  LayerRef layer;
  int row = 0;
  int col = 0;
  int bit = 0;
  auto operator<=>(const BitAddress&) const = default;
};

struct BitFlip {
  BitAddress address;
  int before = 0;
  int after = 1;
  bool operator==(const BitFlip&) const = default;
};

struct FlipRecord {
  std::vector<BitFlip> flips;
  std::size_t eligible_count = 0;
  std::size_t applied_count = 0;
};

/// A single W^(j,i) or a whole MLP j.
struct LayerTarget {
  int j = 1;
  std::optional<int> i;

  std::vector<LayerRef> refs(const GnnModel& model) const;
  std::string to_string() const;
  static LayerTarget parse(const std::string& s);  // "j" or "j.i"
  auto operator<=>(const LayerTarget&) const = default;
};

/// Which population `fraction` is measured against.
enum class FlipPopulation {
  Eligible,  // direction-compatible bits only
  Field,     // every bit of the field; incompatible draws are no-ops
};

const char* to_string(FlipPopulation p);
FlipPopulation parse_flip_population(const std::string& s);

struct FlipPlan {
  LayerTarget target;
  BitField field = BitField::Sign;
  double fraction = 0.01;
  std::uint64_t rng_seed = 0;
  FlipPopulation population = FlipPopulation::Eligible;
};

int read_bit(const GnnModel& model, const BitAddress& a);
float& weight_at(GnnModel& model, const BitAddress& a);

/// Bits of `field` in `target` that a directional flip would change.
/// Order: stage ascending, row-major, bit descending.
std::vector<BitAddress> eligible_bits(const GnnModel& model, const LayerTarget& target, BitField field);

/// Toggles every recorded bit. Applying a record twice restores the model.
void apply_flips(GnnModel& model, const FlipRecord& record);

/// ceil(fraction * population), capped at the population.
std::size_t flips_for(double fraction, std::size_t population);

/// Samples flips per `plan` without replacement and applies them in place.
FlipRecord inject_random(GnnModel& model, const FlipPlan& plan);

/// Clears every set bit of one weight, leaving +0.0. Returns the flip count.
int zero_weight(GnnModel& model, LayerRef layer, int row, int col);

/// The flips zero_weight would perform, without mutating.
std::vector<BitFlip> zeroing_flips(const GnnModel& model, LayerRef layer, int row, int col);

struct AttackPlan {
  FlipRecord record;               // not applied
  bool already_indistinguishable = false;
  std::vector<int> coordinates;    // input coordinates whose columns are targeted
  std::vector<NodeRef> witnesses;  // nodes (or node pairs) the plan was built for
  int steps = 0;                   // node-pair merges (graph attack)
  std::size_t graph_a = 0, graph_b = 0;
  int wl_difference = 0;
};

/// Zeroes every weight in the columns where the stage inputs of u and v
/// differ, so the stage outputs of u and v become bit-identical.
AttackPlan plan_targeted_node_attack(const GnnModel& model, const GraphDataset& dataset, LayerRef layer,
                                     NodeRef u, NodeRef v);

/// Sign-bit-only attack on a ReLU stage: makes every output row that still
/// separates u and v non-positive for both, so ReLU maps both to +0.
AttackPlan plan_relu_sign_attack(const GnnModel& model, const GraphDataset& dataset, LayerRef layer,
                                 NodeRef u, NodeRef v);

/// Picks the equal-order pair with the largest WL difference at iteration j
/// and merges node classes across the two graphs until their stage outputs
/// form equal multisets.
AttackPlan plan_targeted_graph_attack(const GnnModel& model, const GraphDataset& dataset, LayerRef layer);

/// Text replay format, one flip per line: "j,i,row,col,bit,before,after".
void write_flip_record(const FlipRecord& record, std::ostream& out);
FlipRecord read_flip_record(std::istream& in);

}  // namespace wlflip
