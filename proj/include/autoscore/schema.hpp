// Copyright 2026 The autoscore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "autoscore/json.hpp"

namespace autoscore {

/// Value kind of one rubric component.
enum class FieldKind { kBoolean, kTextList, kCount, kText };

std::string_view FieldKindName(FieldKind kind);
std::optional<FieldKind> ParseFieldKind(std::string_view name);

struct ComponentField {
  std::string name;
  FieldKind kind = FieldKind::kText;
  /// Only for kCount: the text_list field whose length this count mirrors.
  std::optional<std::string> derived_from;
  std::string description;

  friend bool operator==(const ComponentField&, const ComponentField&) = default;
};

/// Declares which rubric-relevant components the extraction agent must
/// report for one item. Only obtainable through CompileSchema, so every
/// instance satisfies the schema invariants.
class ComponentSchema {
 public:
  const std::string& item_id() const { return item_id_; }
  const std::vector<ComponentField>& fields() const { return fields_; }
  const ComponentField* Find(std::string_view name) const;

  /// Field names with their kinds and descriptions, one per line, for
  /// inclusion in the extraction prompt.
  std::string Describe() const;

  /// Placeholder JSON skeleton of the expected object, e.g.
  /// {"valid_conclusion": true|false, "conclusions": [string, ...]}.
  std::string Skeleton() const;

  friend bool operator==(const ComponentSchema&, const ComponentSchema&) = default;

 private:
  friend ComponentSchema CompileSchema(const std::string& item_id,
                                       const Json& definition);
  std::string item_id_;
  std::vector<ComponentField> fields_;
};

/// Builds a schema from its config definition:
///   {"fields": [{"name": ..., "kind": "boolean|text_list|count|text",
///                "derived_from": ..., "description": ...}, ...]}
/// Throws kDuplicateField, kDanglingDerivation, kEmptySchema or
/// kInvalidSchema.
ComponentSchema CompileSchema(const std::string& item_id, const Json& definition);

using FieldValue = std::variant<bool, std::vector<std::string>, std::int64_t, std::string>;

/// A validated instance of a ComponentSchema: one value per field, in schema
/// order, with derived counts equal to their source list lengths.
struct StructuredRepresentation {
  std::string schema_id;
  std::vector<std::pair<std::string, FieldValue>> values;
  /// Derived count fields whose stated value disagreed with the list length.
  std::vector<std::string> inconsistency_flags;

  const FieldValue* Get(std::string_view name) const;

  friend bool operator==(const StructuredRepresentation&,
                         const StructuredRepresentation&) = default;
};

/// Returns the first balanced top-level JSON object in a model's raw output,
/// ignoring code fences and surrounding prose. Throws kNoJsonFound.
std::string ExtractJsonBlock(std::string_view raw_model_output);

/// Checks a JSON object against the schema. Unknown keys are dropped, derived
/// counts are recomputed from their lists (mismatches are flagged). Throws
/// kMissingField or kTypeMismatch.
StructuredRepresentation ValidateRepresentation(std::string_view json_text,
                                                const ComponentSchema& schema);
StructuredRepresentation ValidateRepresentationObject(const Json& object,
                                                const ComponentSchema& schema);

/// The bare component object (the "Z" the agents exchange), in schema order.
Json ValuesToJson(const StructuredRepresentation& rep);

/// Full form used inside run records: schema_id, values, inconsistency_flags.
Json ToJson(const StructuredRepresentation& rep);
StructuredRepresentation RepresentationFromJson(const Json& j);

}  // namespace autoscore
