#pragma once

#include <stdexcept>
#include <string>

namespace qsom {

// Vector/matrix lengths disagree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested object exceeds a supported size (qubit count, lattice sites).
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Qubit or neuron index outside its container.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Value outside the documented domain of an operation.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qsom

namespace qsom {

// Unreadable, unwritable or malformed input/output files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qsom
