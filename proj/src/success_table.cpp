// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "obsgprm/success_table.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "obsgprm/error.hpp"

namespace obsgprm {

void UpdateParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha out of [0,1]");
  if (!(initial_sp >= 0.0 && initial_sp <= 1.0)) {
    throw ValidationError("initial_sp out of [0,1]");
  }
}

SuccessTable::SuccessTable(NodeId owner, std::vector<NodeId> neighbors, std::size_t node_count,
                           UpdateParams params)
    : owner_(owner),
      neighbors_(std::move(neighbors)),
      slot_(node_count, -1),
      node_count_(node_count),
      params_(params),
      counts_(neighbors_.size()) {
  params_.validate();
  std::sort(neighbors_.begin(), neighbors_.end());
  for (std::size_t i = 0; i < neighbors_.size(); ++i) {
    if (neighbors_[i] >= node_count_ || neighbors_[i] == owner_) {
      throw ValidationError("invalid neighbor " + std::to_string(neighbors_[i]));
    }
    slot_[neighbors_[i]] = static_cast<std::int32_t>(i);
  }
  for (auto& c : counts_) {
    c.dest[0].assign(node_count_, 0);
    c.dest[1].assign(node_count_, 0);
  }
}

void SuccessTable::warm_start(const HopTable& hops) {
  warm_prior_.assign(neighbors_.size() * node_count_, params_.initial_sp);
  for (std::size_t i = 0; i < neighbors_.size(); ++i) {
    for (std::size_t d = 0; d < node_count_; ++d) {
      if (d == owner_) continue;
      int extra = hops(neighbors_[i], static_cast<NodeId>(d)) + 1 -
                  hops(owner_, static_cast<NodeId>(d));
      warm_prior_[i * node_count_ + d] = 1.0 / (1.0 + std::max(0, extra));
    }
  }
}

std::size_t SuccessTable::index_of(NodeId k) const {
  if (k >= node_count_ || slot_[k] < 0) {
    throw UnknownNeighborError("node " + std::to_string(k) + " is not a neighbor of " +
                               std::to_string(owner_));
  }
  return static_cast<std::size_t>(slot_[k]);
}

void SuccessTable::check_evidence(const EvidenceVector& e) const {
  StateCounts s;
  s.dest = static_cast<int>(node_count_);
  if (!is_valid(e, s)) throw ValidationError("evidence vector out of range");
}

std::optional<double> SuccessTable::stored(NodeId k, const EvidenceVector& e) const {
  auto it = entries_.find(entry_key(index_of(k), e));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double SuccessTable::fallback(std::size_t idx, const EvidenceVector& e) const {
  if (!warm_prior_.empty()) return warm_prior_[idx * node_count_ + e.dest];
  if (params_.naive_bayes_fallback && counts_[idx].outcomes[0] + counts_[idx].outcomes[1] > 0) {
    auto s = naive_bayes_scores(idx, e);
    return s[0] / (s[0] + s[1]);
  }
  return params_.initial_sp;
}

double SuccessTable::sp(NodeId k, const EvidenceVector& e) const {
  std::size_t idx = index_of(k);
  auto it = entries_.find(entry_key(idx, e));
  if (it != entries_.end()) return it->second;
  return fallback(idx, e);
}

double SuccessTable::update(NodeId k, const EvidenceVector& e, Outcome outcome) {
  std::size_t idx = index_of(k);
  check_evidence(e);
  auto [it, inserted] = entries_.try_emplace(entry_key(idx, e), 0.0);
  double current = inserted ? fallback(idx, e) : it->second;
  double target = outcome == Outcome::Success ? 1.0 : 0.0;
  double next = params_.alpha * current + (1.0 - params_.alpha) * target;
  it->second = std::clamp(next, 0.0, 1.0);

  Counts& c = counts_[idx];
  auto o = static_cast<std::size_t>(outcome);
  ++c.outcomes[o];
  ++c.offset[o][e.offset];
  ++c.blr[o][static_cast<std::size_t>(e.blr)];
  ++c.hops[o][e.hops];
  ++c.dest[o][e.dest];
  return it->second;
}

void SuccessTable::set(NodeId k, const EvidenceVector& e, double sp) {
  check_evidence(e);
  if (!(sp >= 0.0 && sp <= 1.0)) throw ValidationError("SP out of [0,1]");
  entries_[entry_key(index_of(k), e)] = sp;
}

std::array<double, 2> SuccessTable::naive_bayes_scores(std::size_t idx,
                                                       const EvidenceVector& e) const {
  const Counts& c = counts_[idx];
  const double total = static_cast<double>(c.outcomes[0] + c.outcomes[1]);
  std::array<double, 2> score{};
  for (std::size_t o = 0; o < 2; ++o) {
    const double n = static_cast<double>(c.outcomes[o]);
    auto factor = [n](std::uint64_t count, int states) {
      return (static_cast<double>(count) + 1.0) / (n + states);
    };
    score[o] = (n + 1.0) / (total + 2.0) * factor(c.offset[o][e.offset], kOffsetStates) *
               factor(c.blr[o][static_cast<std::size_t>(e.blr)], kBlrStates) *
               factor(c.hops[o][e.hops], kHopStates) *
               factor(c.dest[o][e.dest], static_cast<int>(node_count_));
  }
  return score;
}

std::pair<Outcome, double> SuccessTable::naive_bayes_map(NodeId k,
                                                         const EvidenceVector& e) const {
  std::size_t idx = index_of(k);
  check_evidence(e);
  if (counts_[idx].outcomes[0] + counts_[idx].outcomes[1] == 0) {
    throw NoObservationsError("neighbor " + std::to_string(k) + " has no recorded outcomes");
  }
  auto s = naive_bayes_scores(idx, e);
  if (s[0] >= s[1]) return {Outcome::Success, s[0]};
  return {Outcome::Failure, s[1]};
}

double SuccessTable::naive_bayes_posterior(NodeId k, const EvidenceVector& e) const {
  naive_bayes_map(k, e);  // validates k, e and the observation count
  auto s = naive_bayes_scores(index_of(k), e);
  return s[0] / (s[0] + s[1]);
}

std::uint64_t SuccessTable::observations(NodeId k) const {
  const Counts& c = counts_[index_of(k)];
  return c.outcomes[0] + c.outcomes[1];
}

void SuccessTable::dump(std::ostream& out) const {
  std::vector<std::pair<std::uint64_t, double>> rows(entries_.begin(), entries_.end());
  std::sort(rows.begin(), rows.end());
  auto old_precision = out.precision(17);
  out << "# k o b nb d sp\n";
  for (auto& [key, value] : rows) {
    NodeId k = neighbors_[key >> 32];
    auto e = EvidenceVector::from_key(static_cast<std::uint32_t>(key & 0xFFFFFFFFu));
    out << k << " " << int(e.offset) << " " << int(e.blr) << " " << int(e.hops) << " " << e.dest
        << " " << value << "\n";
  }
  out.precision(old_precision);
}

void SuccessTable::restore(std::istream& in) {
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    long k = 0, o = 0, b = 0, nb = 0, d = 0;
    double value = 0.0;
    if (!(line >> k)) continue;
    if (!(line >> o >> b >> nb >> d >> value)) {
      throw ParseError("line " + std::to_string(line_no) + ": expected `k o b nb d sp`");
    }
    if (k < 0 || o < 0 || b < 0 || nb < 0 || d < 0 || o >= kOffsetStates || b >= kBlrStates ||
        nb >= kHopStates || static_cast<std::size_t>(d) >= node_count_ ||
        static_cast<std::size_t>(k) >= node_count_) {
      throw ParseError("line " + std::to_string(line_no) + ": field out of range");
    }
    EvidenceVector e{static_cast<std::uint8_t>(o), static_cast<BlrClass>(b),
                     static_cast<std::uint8_t>(nb), static_cast<NodeId>(d)};
    set(static_cast<NodeId>(k), e, value);
  }
}

}  // namespace obsgprm
