#include "wlflip/faults.hpp"

#include "wlflip/bounds.hpp"
#include "wlflip/errors.hpp"
#include "wlflip/seed.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace wlflip {

const char* to_string(BitField f) {
  switch (f) {
    case BitField::Sign: return "sign";
    case BitField::Exponent: return "exponent";
    case BitField::Mantissa: return "mantissa";
  }
  return "?";
}

BitField parse_bit_field(const std::string& s) {
  std::string l;
  for (const char c : s) l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (l == "sign") return BitField::Sign;
  if (l == "exponent") return BitField::Exponent;
  if (l == "mantissa") return BitField::Mantissa;
  throw ConfigError("unknown bit field '" + s + "' (expected sign, exponent or mantissa)");
}

const char* to_string(FlipPopulation p) { return p == FlipPopulation::Field ? "field" : "eligible"; }

FlipPopulation parse_flip_population(const std::string& s) {
  if (s == "eligible") return FlipPopulation::Eligible;
  if (s == "field") return FlipPopulation::Field;
  throw ConfigError("unknown flip population '" + s + "' (expected eligible or field)");
}

std::vector<LayerRef> LayerTarget::refs(const GnnModel& model) const {
  if (i) {
    model.dense({j, *i});  // validates
    return {{j, *i}};
  }
  std::vector<LayerRef> out;
  for (int s = 1; s <= model.stages(j); ++s) out.push_back({j, s});
  return out;
}

std::string LayerTarget::to_string() const {
  return i ? std::to_string(j) + "." + std::to_string(*i) : std::to_string(j);
}

LayerTarget LayerTarget::parse(const std::string& s) {
  LayerTarget t;
  try {
    const auto dot = s.find('.');
    std::size_t used = 0;
    t.j = std::stoi(s.substr(0, dot), &used);
    if (used != (dot == std::string::npos ? s.size() : dot)) throw std::invalid_argument(s);
    if (dot != std::string::npos) {
      const auto rest = s.substr(dot + 1);
      t.i = std::stoi(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(s);
    }
  } catch (const std::logic_error&) {
    throw ConfigError("bad layer target '" + s + "' (expected j or j.i)");
  }
  if (t.j < 1 || (t.i && *t.i < 1)) throw ConfigError("layer indices are 1-based: '" + s + "'");
  return t;
}

float& weight_at(GnnModel& model, const BitAddress& a) {
  auto& w = model.dense(a.layer).weight;
  if (a.row < 0 || a.col < 0 || a.row >= w.rows() || a.col >= w.cols() || a.bit < 0 || a.bit > 31)
    throw AddressError("bit address out of range");
  return w(a.row, a.col);
}

int read_bit(const GnnModel& model, const BitAddress& a) {
  return static_cast<int>((scalar_bits(weight_at(const_cast<GnnModel&>(model), a)) >> a.bit) & 1u);
}

namespace {

void toggle(float& w, int bit) { w = std::bit_cast<float>(scalar_bits(w) ^ (std::uint32_t{1} << bit)); }

}  // namespace

std::vector<BitAddress> eligible_bits(const GnnModel& model, const LayerTarget& target, BitField field) {
  std::vector<BitAddress> out;
  const std::uint32_t want = static_cast<std::uint32_t>(eligible_value(field));
  for (const auto ref : target.refs(model)) {
    const auto& w = model.dense(ref).weight;
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c) {
        const auto bits = scalar_bits(w(r, c));
        for (int b = field_high_bit(field); b >= field_low_bit(field); --b)
          if (((bits >> b) & 1u) == want) out.push_back({ref, r, c, b});
      }
  }
  return out;
}

void apply_flips(GnnModel& model, const FlipRecord& record) {
  for (const auto& f : record.flips) toggle(weight_at(model, f.address), f.address.bit);
}

std::size_t flips_for(double fraction, std::size_t population) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("flip fraction must lie in (0, 1]");
  // Guard against 0.3 * 10 = 3.0000000000000004 style overshoot before ceil.
  const double exact = fraction * static_cast<double>(population);
  const double nearest = std::round(exact);
  const double count = std::abs(exact - nearest) <= 1e-9 * std::max(1.0, exact) ? nearest : std::ceil(exact);
  return std::min(population, static_cast<std::size_t>(count));
}

FlipRecord inject_random(GnnModel& model, const FlipPlan& plan) {
  std::vector<BitAddress> population;
  if (plan.population == FlipPopulation::Eligible) {
    population = eligible_bits(model, plan.target, plan.field);
  } else {
    for (const auto ref : plan.target.refs(model)) {
      const auto& w = model.dense(ref).weight;
      for (int r = 0; r < w.rows(); ++r)
        for (int c = 0; c < w.cols(); ++c)
          for (int b = field_high_bit(plan.field); b >= field_low_bit(plan.field); --b)
            population.push_back({ref, r, c, b});
    }
  }
  FlipRecord record;
  record.eligible_count = population.size();
  const std::size_t draws = population.empty() ? 0 : flips_for(plan.fraction, population.size());

  // Partial Fisher-Yates: the first `draws` slots become the sample.
  Rng rng(plan.rng_seed);
  for (std::size_t s = 0; s < draws; ++s) {
    const auto pick = s + static_cast<std::size_t>(uniform_below(rng, population.size() - s));
    std::swap(population[s], population[pick]);
  }
  population.resize(draws);
  std::sort(population.begin(), population.end());

  const int from = eligible_value(plan.field);
  for (const auto& a : population) {
    if (read_bit(model, a) != from) continue;
    toggle(weight_at(model, a), a.bit);
    record.flips.push_back({a, from, 1 - from});
  }
  record.applied_count = record.flips.size();
  return record;
}

std::vector<BitFlip> zeroing_flips(const GnnModel& model, LayerRef layer, int row, int col) {
  std::vector<BitFlip> out;
  const BitAddress base{layer, row, col, 0};
  const auto bits = scalar_bits(weight_at(const_cast<GnnModel&>(model), base));
  for (int b = 31; b >= 0; --b)
    if ((bits >> b) & 1u) out.push_back({{layer, row, col, b}, 1, 0});
  return out;
}

int zero_weight(GnnModel& model, LayerRef layer, int row, int col) {
  FlipRecord r;
  r.flips = zeroing_flips(model, layer, row, col);
  apply_flips(model, r);
  return static_cast<int>(r.flips.size());
}

namespace {

struct NodeInputs {
  RowVector32 u, v;
};

ForwardTrace trace_of(const GnnModel& model, const GraphDataset& dataset, int graph) {
  if (graph < 0 || static_cast<std::size_t>(graph) >= dataset.size())
    throw AddressError("graph index " + std::to_string(graph) + " out of range");
  return forward(model, dataset.graphs[static_cast<std::size_t>(graph)]);
}

NodeInputs stage_inputs(const GnnModel& model, const GraphDataset& dataset, LayerRef layer, NodeRef u, NodeRef v) {
  model.dense(layer);
  const auto tu = trace_of(model, dataset, u.graph);
  const auto tv = u.graph == v.graph ? tu : trace_of(model, dataset, v.graph);
  const auto& xu = tu.stage_input(layer);
  const auto& xv = tv.stage_input(layer);
  if (u.node < 0 || u.node >= xu.rows() || v.node < 0 || v.node >= xv.rows())
    throw AddressError("node index out of range");
  return {xu.row(u.node), xv.row(v.node)};
}

std::vector<int> differing_columns(const RowVector32& a, const RowVector32& b) {
  std::vector<int> out;
  for (Eigen::Index c = 0; c < a.size(); ++c)
    if (scalar_bits(a(c)) != scalar_bits(b(c))) out.push_back(static_cast<int>(c));
  return out;
}

void finish(FlipRecord& r) {
  std::sort(r.flips.begin(), r.flips.end(),
            [](const BitFlip& x, const BitFlip& y) { return x.address < y.address; });
  r.eligible_count = r.applied_count = r.flips.size();
}

}  // namespace

AttackPlan plan_targeted_node_attack(const GnnModel& model, const GraphDataset& dataset, LayerRef layer,
                                     NodeRef u, NodeRef v) {
  if (u == v) throw PlannerError("node attack needs two distinct nodes");
  const auto x = stage_inputs(model, dataset, layer, u, v);
  AttackPlan plan;
  plan.witnesses = {u, v};
  plan.coordinates = differing_columns(x.u, x.v);
  plan.already_indistinguishable = plan.coordinates.empty();
  const auto& w = model.dense(layer).weight;
  for (const int c : plan.coordinates)
    for (int r = 0; r < w.rows(); ++r) {
      auto flips = zeroing_flips(model, layer, r, c);
      plan.record.flips.insert(plan.record.flips.end(), flips.begin(), flips.end());
    }
  finish(plan.record);
  return plan;
}

AttackPlan plan_relu_sign_attack(const GnnModel& model, const GraphDataset& dataset, LayerRef layer,
                                 NodeRef u, NodeRef v) {
  if (u == v) throw PlannerError("node attack needs two distinct nodes");
  const auto& stage = model.dense(layer);
  if (stage.activation != Activation::ReLU) throw PlannerError("sign attack requires a ReLU stage");
  const auto x = stage_inputs(model, dataset, layer, u, v);
  AttackPlan plan;
  plan.witnesses = {u, v};
  plan.coordinates = differing_columns(x.u, x.v);
  plan.already_indistinguishable = plan.coordinates.empty();
  if (plan.already_indistinguishable) return plan;

  const auto same_output = [&](const RowVector32& w) {
    const float a = activate(Activation::ReLU, ordered_dot(w, x.u));
    const float b = activate(Activation::ReLU, ordered_dot(w, x.v));
    return scalar_bits(a) == scalar_bits(b);
  };
  std::vector<int> targeted;
  for (Eigen::Index r = 0; r < stage.weight.rows(); ++r) {
    RowVector32 w = stage.weight.row(r);
    if (same_output(w)) continue;
    const auto flip = [&](int c) {
      w(c) = -w(c);
      plan.record.flips.push_back({{layer, static_cast<int>(r), c, 31}, 0, 1});
    };
    // Differing coordinates first; they are what separates u from v.
    for (const int c : plan.coordinates)
      if (w(c) > 0.0f && std::max(x.u(c), x.v(c)) > 0.0f) flip(c);
    if (!same_output(w)) {
      // Shared coordinates can keep the row positive; drop the largest
      // positive contributions until both dot products are clamped.
      std::vector<int> shared;
      for (Eigen::Index c = 0; c < w.size(); ++c)
        if (w(c) > 0.0f && std::max(x.u(c), x.v(c)) > 0.0f) shared.push_back(static_cast<int>(c));
      std::sort(shared.begin(), shared.end(), [&](int a, int b) {
        const float ca = w(a) * std::max(x.u(a), x.v(a));
        const float cb = w(b) * std::max(x.u(b), x.v(b));
        return ca != cb ? ca > cb : a < b;
      });
      for (const int c : shared) {
        if (same_output(w)) break;
        flip(c);
      }
    }
    if (!same_output(w))
      throw PlannerError("sign flips cannot clamp row " + std::to_string(r) + " (negative inputs)");
    targeted.push_back(static_cast<int>(r));
  }
  finish(plan.record);
  return plan;
}

AttackPlan plan_targeted_graph_attack(const GnnModel& model, const GraphDataset& dataset, LayerRef layer) {
  model.dense(layer);
  const auto pair = wl_max_pair(dataset, layer.j);
  if (!pair || pair->e == 0)
    throw PlannerError("dataset has no equal-order WL-distinguishable graph pair at iteration " +
                       std::to_string(layer.j));
  AttackPlan plan;
  plan.graph_a = pair->g;
  plan.graph_b = pair->h;
  plan.wl_difference = pair->e;
  const auto tg = forward(model, dataset.graphs[pair->g]);
  const auto th = forward(model, dataset.graphs[pair->h]);
  const Matrix32& xg = tg.stage_input(layer);
  const Matrix32& xh = th.stage_input(layer);
  const auto& w = model.dense(layer).weight;
  std::vector<char> zeroed(static_cast<std::size_t>(w.cols()), 0);

  const auto key = [&](const Matrix32& x, Eigen::Index v) {
    std::vector<std::uint32_t> k;
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      if (!zeroed[static_cast<std::size_t>(c)]) k.push_back(scalar_bits(x(v, c)));
    return k;
  };

  for (;;) {
    std::map<std::vector<std::uint32_t>, int> balance;  // count in G minus count in H
    for (Eigen::Index v = 0; v < xg.rows(); ++v) ++balance[key(xg, v)];
    for (Eigen::Index v = 0; v < xh.rows(); ++v) --balance[key(xh, v)];
    Eigen::Index u = -1, v = -1;
    for (Eigen::Index n = 0; n < xg.rows() && u < 0; ++n)
      if (balance[key(xg, n)] > 0) u = n;
    for (Eigen::Index n = 0; n < xh.rows() && v < 0; ++n)
      if (balance[key(xh, n)] < 0) v = n;
    if (u < 0 || v < 0) break;

    ++plan.steps;
    plan.witnesses.push_back({static_cast<int>(pair->g), static_cast<int>(u)});
    plan.witnesses.push_back({static_cast<int>(pair->h), static_cast<int>(v)});
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      if (zeroed[static_cast<std::size_t>(c)] || scalar_bits(xg(u, c)) == scalar_bits(xh(v, c))) continue;
      zeroed[static_cast<std::size_t>(c)] = 1;
      plan.coordinates.push_back(static_cast<int>(c));
      for (int r = 0; r < w.rows(); ++r) {
        auto flips = zeroing_flips(model, layer, r, static_cast<int>(c));
        plan.record.flips.insert(plan.record.flips.end(), flips.begin(), flips.end());
      }
    }
  }
  plan.already_indistinguishable = plan.steps == 0;
  std::sort(plan.coordinates.begin(), plan.coordinates.end());
  finish(plan.record);
  return plan;
}

void write_flip_record(const FlipRecord& record, std::ostream& out) {
  out << "# eligible=" << record.eligible_count << " applied=" << record.applied_count << '\n';
  for (const auto& f : record.flips)
    out << f.address.layer.j << ',' << f.address.layer.i << ',' << f.address.row << ','
        << f.address.col << ',' << f.address.bit << ',' << f.before << ',' << f.after << '\n';
}

FlipRecord read_flip_record(std::istream& in) {
  FlipRecord record;
  std::string line;
  std::size_t n = 0;
  bool counts = false;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    if (line[0] == '#') {
      unsigned long long e = 0, a = 0;
      if (std::sscanf(line.c_str(), "# eligible=%llu applied=%llu", &e, &a) == 2) {
        record.eligible_count = e;
        record.applied_count = a;
        counts = true;
      }
      continue;
    }
    BitFlip f;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%d,%d,%d,%d%c", &f.address.layer.j, &f.address.layer.i,
                    &f.address.row, &f.address.col, &f.address.bit, &f.before, &f.after, &tail) != 7 ||
        f.address.bit < 0 || f.address.bit > 31 || (f.before | f.after) > 1 || f.before == f.after)
      throw FormatError("flip record", n, "expected 'j,i,row,col,bit,before,after'");
    record.flips.push_back(f);
  }
  if (!counts) record.eligible_count = record.applied_count = record.flips.size();
  return record;
}

}  // namespace wlflip
