/*
 * Copyright 2026 The fhefft Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FHEFFT_ERRORS_HPP_
#define FHEFFT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fhefft {

// Scheme parameters violate their invariants (e.g. q too small for the
// requested depth budget).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Accumulated ciphertext noise reached the decryption threshold, or a
// ciphertext was decrypted under the wrong key.
class NoiseOverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// API misuse: mixing handles from different engines, mismatched fixed-point
// formats, malformed buffer sizes.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The engine lacks the key material required for the operation.
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A real value does not fit the integer range of a fixed-point format.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed input file. The message carries the line number (text formats)
// or byte offset (binary formats).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fhefft

#endif  // FHEFFT_ERRORS_HPP_
