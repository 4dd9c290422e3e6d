#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "chainrec/vertex.hpp"

namespace chainrec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An operator column (or a vector's support) leaves the truncation window.
class LeakageOutOfWindow : public Error {
 public:
  LeakageOutOfWindow(VertexId vertex, std::optional<std::size_t> step = std::nullopt)
      : Error(message(vertex, step)), vertex_(vertex), step_(step) {}

  VertexId vertex() const noexcept { return vertex_; }
  std::optional<std::size_t> step() const noexcept { return step_; }

  LeakageOutOfWindow at_step(std::size_t step) const { return LeakageOutOfWindow(vertex_, step); }

 private:
  static std::string message(VertexId v, std::optional<std::size_t> step) {
    std::string m = "leakage out of truncation window at vertex " + v.str();
    if (step) m += " (step " + std::to_string(*step) + ")";
    return m;
  }

  VertexId vertex_;
  std::optional<std::size_t> step_;
};

class UndersizedWindow : public Error {
 public:
  UndersizedWindow(const std::string& what, VertexId missing)
      : Error("undersized window: " + what + " needs vertex " + missing.str()), missing_(missing) {}
  VertexId missing() const noexcept { return missing_; }

 private:
  VertexId missing_;
};

class MissingWeight : public Error {
 public:
  explicit MissingWeight(VertexId v) : Error("no weight declared for vertex " + v.str()), vertex_(v) {}
  VertexId vertex() const noexcept { return vertex_; }

 private:
  VertexId vertex_;
};

class InvalidTree : public Error {
 public:
  using Error::Error;
};

class WeightConditionViolation : public Error {
 public:
  using Error::Error;
};

class EndpointMismatch : public Error {
 public:
  using Error::Error;
};

class NonUniqueInfluence : public Error {
 public:
  explicit NonUniqueInfluence(VertexId v)
      : Error("more than one vertex feeds " + v.str() + "; influence path is not unique"), vertex_(v) {}
  VertexId vertex() const noexcept { return vertex_; }

 private:
  VertexId vertex_;
};

/// The influence path reached a row that receives contributions from outside the window.
class InfluenceTruncated : public Error {
 public:
  InfluenceTruncated(VertexId v, std::size_t step)
      : Error("influence path truncated by the window at " + v.str() + " (step " + std::to_string(step) + ")"),
        vertex_(v),
        step_(step) {}
  VertexId vertex() const noexcept { return vertex_; }
  std::size_t step() const noexcept { return step_; }

 private:
  VertexId vertex_;
  std::size_t step_;
};

class NotApplicable : public Error {
 public:
  using Error::Error;
};

class ZeroWeightEncountered : public Error {
 public:
  explicit ZeroWeightEncountered(long long n)
      : Error("zero weight at index " + std::to_string(n) + "; use zero_weight_analysis"), index_(n) {}
  long long index() const noexcept { return index_; }

 private:
  long long index_;
};

}  // namespace chainrec
