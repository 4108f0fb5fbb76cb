// Copyright 2026 The mvpose Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MVPOSE_ERROR_H_
#define MVPOSE_ERROR_H_

#include <stdexcept>
#include <string>

namespace mvpose {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a documented type invariant (non-orthonormal rotation,
// negative focal length, score outside [0,1], ...).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Point lies on the camera's principal plane.
class DegenerateDepth : public Error {
 public:
  using Error::Error;
};

// A cross product needed to close a segment frame vanished.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class MissingJoint : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

// Fewer than two cameras (or views) contribute.
class InsufficientCameras : public Error {
 public:
  using Error::Error;
};

// Normal matrix of the weighted system is singular or ill conditioned.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

class AllWeightsZero : public Error {
 public:
  using Error::Error;
};

// No estimate could be paired with a ground-truth frame.
class NoMatches : public Error {
 public:
  using Error::Error;
};

// Malformed input document. `byte_offset` is the position reported by the
// parser, or npos when the failure is semantic rather than syntactic.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset = npos)
      : Error(what), byte_offset_(byte_offset) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mvpose

#endif  // MVPOSE_ERROR_H_
