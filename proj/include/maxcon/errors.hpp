#pragma once

#include <stdexcept>
#include <string>

namespace maxcon {

// Out-of-range or inconsistent parameter (negative variance, bad window, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dimension mismatch between state vectors, graphs and instances.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Random graph generation ran out of retries.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation needs a connected graph (e.g. finite diameter).
class DisconnectedGraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Engine rounds called out of order, e.g. a D-MC round without a reception cache.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace maxcon
