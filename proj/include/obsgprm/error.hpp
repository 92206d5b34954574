// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace obsgprm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (topology, matrix, scenario, table dump).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnknownNeighborError : public Error {
 public:
  using Error::Error;
};

// Naive-Bayes estimate requested for a neighbor with no recorded outcomes.
class NoObservationsError : public Error {
 public:
  using Error::Error;
};

// A ratio or mean whose denominator is zero (no bursts sent, none delivered).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace obsgprm
