// Copyright 2026 The ginsign Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ginsign/error.h"

namespace ginsign {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kIo: return "Io";
    case ErrorKind::kSchema: return "SchemaError";
    case ErrorKind::kUnknownType: return "UnknownType";
    case ErrorKind::kDuplicateName: return "DuplicateName";
    case ErrorKind::kInvalidIdentifier: return "InvalidIdentifier";
    case ErrorKind::kSizeLimit: return "SizeLimit";
    case ErrorKind::kSyntax: return "SyntaxError";
    case ErrorKind::kMixedAtomKinds: return "MixedAtomKinds";
    case ErrorKind::kMissingMapping: return "MissingMapping";
    case ErrorKind::kEmptyCandidateList: return "EmptyCandidateList";
    case ErrorKind::kSlotOutOfRange: return "SlotOutOfRange";
    case ErrorKind::kScorerFailure: return "ScorerFailure";
    case ErrorKind::kTransport: return "Transport";
    case ErrorKind::kProtocolViolation: return "ProtocolViolation";
    case ErrorKind::kTimeout: return "Timeout";
    case ErrorKind::kBoundTooSmall: return "BoundTooSmall";
    case ErrorKind::kAlphabetTooLarge: return "AlphabetTooLarge";
    case ErrorKind::kUngroundedAtom: return "UngroundedAtom";
    case ErrorKind::kAlignmentMismatch: return "AlignmentMismatch";
    case ErrorKind::kTypeError: return "TypeError";
  }
  return "Unknown";
}

}  // namespace ginsign
