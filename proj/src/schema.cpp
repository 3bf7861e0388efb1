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

#include "autoscore/schema.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <spdlog/spdlog.h>

#include "autoscore/error.hpp"

namespace autoscore {
namespace {

bool IsIdentifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

std::string JsonTypeName(const Json& v) {
  if (v.is_number_float()) return "float";
  if (v.is_number_integer()) return "integer";
  return v.type_name();
}

// End index (inclusive) of the object starting at `open`, or npos when the
// braces never balance. String contents are skipped so braces inside quoted
// text do not count.
std::size_t MatchingBrace(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

}  // namespace

std::string_view FieldKindName(FieldKind kind) {
  switch (kind) {
    case FieldKind::kBoolean: return "boolean";
    case FieldKind::kTextList: return "text_list";
    case FieldKind::kCount: return "count";
    case FieldKind::kText: return "text";
  }
  return "text";
}

std::optional<FieldKind> ParseFieldKind(std::string_view name) {
  if (name == "boolean") return FieldKind::kBoolean;
  if (name == "text_list") return FieldKind::kTextList;
  if (name == "count") return FieldKind::kCount;
  if (name == "text") return FieldKind::kText;
  return std::nullopt;
}

const ComponentField* ComponentSchema::Find(std::string_view name) const {
  for (const auto& f : fields_) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::string ComponentSchema::Describe() const {
  std::string out;
  for (const auto& f : fields_) {
    out += "- \"" + f.name + "\" (";
    out += FieldKindName(f.kind);
    if (f.derived_from) {
      out += ", must equal the number of items in \"" + *f.derived_from + "\"";
    }
    out += ")";
    if (!f.description.empty()) out += ": " + f.description;
    out += "\n";
  }
  return out;
}

std::string ComponentSchema::Skeleton() const {
  std::string out = "{\n";
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    const auto& f = fields_[i];
    out += "  \"" + f.name + "\": ";
    switch (f.kind) {
      case FieldKind::kBoolean: out += "true|false"; break;
      case FieldKind::kTextList: out += "[string, ...]"; break;
      case FieldKind::kCount: out += "integer"; break;
      case FieldKind::kText: out += "string"; break;
    }
    if (i + 1 < fields_.size()) out += ",";
    out += "\n";
  }
  out += "}";
  return out;
}

ComponentSchema CompileSchema(const std::string& item_id, const Json& definition) {
  if (!definition.is_object() || !definition.contains("fields") ||
      !definition["fields"].is_array()) {
    throw Error(ErrorCode::kInvalidSchema,
                "schema for '" + item_id + "' needs a \"fields\" array");
  }
  const Json& raw_fields = definition["fields"];
  if (raw_fields.empty()) {
    throw Error(ErrorCode::kEmptySchema, "schema for '" + item_id + "' declares no fields");
  }

  ComponentSchema schema;
  schema.item_id_ = item_id;
  std::set<std::string> seen;
  for (const auto& raw : raw_fields) {
    if (!raw.is_object() || !raw.contains("name") || !raw["name"].is_string() ||
        !raw.contains("kind") || !raw["kind"].is_string()) {
      throw Error(ErrorCode::kInvalidSchema,
                  "each field needs string \"name\" and \"kind\": " + raw.dump());
    }
    ComponentField field;
    field.name = raw["name"].get<std::string>();
    if (!IsIdentifier(field.name)) {
      throw Error(ErrorCode::kInvalidSchema, "field name '" + field.name + "' is not an identifier");
    }
    auto kind = ParseFieldKind(raw["kind"].get<std::string>());
    if (!kind) {
      throw Error(ErrorCode::kInvalidSchema,
                  "field '" + field.name + "' has unknown kind " + raw["kind"].dump());
    }
    field.kind = *kind;
    if (raw.contains("derived_from") && !raw["derived_from"].is_null()) {
      if (field.kind != FieldKind::kCount || !raw["derived_from"].is_string()) {
        throw Error(ErrorCode::kInvalidSchema,
                    "derived_from is only valid on count fields ('" + field.name + "')");
      }
      field.derived_from = raw["derived_from"].get<std::string>();
    }
    if (raw.contains("description") && raw["description"].is_string()) {
      field.description = raw["description"].get<std::string>();
    }
    if (!seen.insert(field.name).second) {
      throw Error(ErrorCode::kDuplicateField, field.name);
    }
    schema.fields_.push_back(std::move(field));
  }

  for (const auto& f : schema.fields_) {
    if (!f.derived_from) continue;
    const ComponentField* source = schema.Find(*f.derived_from);
    if (source == nullptr || source->kind != FieldKind::kTextList) {
      throw Error(ErrorCode::kDanglingDerivation,
                  f.name + " -> " + *f.derived_from + " (missing or not a text_list)");
    }
  }
  return schema;
}

const FieldValue* StructuredRepresentation::Get(std::string_view name) const {
  for (const auto& [key, value] : values) {
    if (key == name) return &value;
  }
  return nullptr;
}

std::string ExtractJsonBlock(std::string_view raw) {
  for (std::size_t open = raw.find('{'); open != std::string_view::npos;
       open = raw.find('{', open + 1)) {
    std::size_t close = MatchingBrace(raw, open);
    if (close == std::string_view::npos) continue;
    std::string candidate(raw.substr(open, close - open + 1));
    Json parsed = Json::parse(candidate, nullptr, /*allow_exceptions=*/false);
    if (!parsed.is_discarded() && parsed.is_object()) return candidate;
  }
  std::string preview(raw.substr(0, 80));
  throw Error(ErrorCode::kNoJsonFound, "no JSON object in output: \"" + preview + "\"");
}

StructuredRepresentation ValidateRepresentation(std::string_view json_text,
                                                const ComponentSchema& schema) {
  Json parsed = Json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    throw Error(ErrorCode::kNoJsonFound, "representation is not valid JSON");
  }
  return ValidateRepresentationObject(parsed, schema);
}

StructuredRepresentation ValidateRepresentationObject(const Json& object,
                                                const ComponentSchema& schema) {
  if (!object.is_object()) {
    throw Error(ErrorCode::kTypeMismatch,
                "<root>: expected object, found " + JsonTypeName(object));
  }

  auto mismatch = [](const ComponentField& f, const Json& v) {
    return Error(ErrorCode::kTypeMismatch, f.name + ": expected " +
                                               std::string(FieldKindName(f.kind)) +
                                               ", found " + JsonTypeName(v));
  };

  StructuredRepresentation rep;
  rep.schema_id = schema.item_id();
  for (const auto& field : schema.fields()) {
    auto it = object.find(field.name);
    if (it == object.end()) throw Error(ErrorCode::kMissingField, field.name);
    const Json& v = *it;
    switch (field.kind) {
      case FieldKind::kBoolean:
        if (!v.is_boolean()) throw mismatch(field, v);
        rep.values.emplace_back(field.name, v.get<bool>());
        break;
      case FieldKind::kTextList: {
        if (!v.is_array()) throw mismatch(field, v);
        std::vector<std::string> items;
        for (const auto& e : v) {
          if (!e.is_string()) throw mismatch(field, e);
          items.push_back(e.get<std::string>());
        }
        rep.values.emplace_back(field.name, std::move(items));
        break;
      }
      case FieldKind::kCount:
        if (!v.is_number_integer() ||
            (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
          throw mismatch(field, v);
        }
        rep.values.emplace_back(field.name, v.get<std::int64_t>());
        break;
      case FieldKind::kText:
        if (!v.is_string()) throw mismatch(field, v);
        rep.values.emplace_back(field.name, v.get<std::string>());
        break;
    }
  }

  for (auto& [name, value] : rep.values) {
    const ComponentField* field = schema.Find(name);
    if (!field->derived_from) continue;
    const auto& source = std::get<std::vector<std::string>>(*rep.Get(*field->derived_from));
    auto actual = static_cast<std::int64_t>(source.size());
    if (std::get<std::int64_t>(value) != actual) {
      rep.inconsistency_flags.push_back(name);
      value = actual;
    }
  }

  for (const auto& [key, _] : object.items()) {
    if (schema.Find(key) == nullptr) {
      spdlog::warn("dropping unknown key '{}' from {} representation", key, schema.item_id());
    }
  }
  return rep;
}

Json ValuesToJson(const StructuredRepresentation& rep) {
  Json out = Json::object();
  for (const auto& [name, value] : rep.values) {
    std::visit([&out, &n = name](const auto& v) { out[n] = v; }, value);
  }
  return out;
}

Json ToJson(const StructuredRepresentation& rep) {
  Json out = Json::object();
  out["schema_id"] = rep.schema_id;
  out["values"] = ValuesToJson(rep);
  out["inconsistency_flags"] = rep.inconsistency_flags;
  return out;
}

StructuredRepresentation RepresentationFromJson(const Json& j) {
  StructuredRepresentation rep;
  rep.schema_id = j.at("schema_id").get<std::string>();
  for (const auto& [key, v] : j.at("values").items()) {
    if (v.is_boolean()) {
      rep.values.emplace_back(key, v.get<bool>());
    } else if (v.is_array()) {
      rep.values.emplace_back(key, v.get<std::vector<std::string>>());
    } else if (v.is_number_integer()) {
      rep.values.emplace_back(key, v.get<std::int64_t>());
    } else if (v.is_string()) {
      rep.values.emplace_back(key, v.get<std::string>());
    } else {
      throw Error(ErrorCode::kTypeMismatch, key + ": unsupported stored value " + v.dump());
    }
  }
  rep.inconsistency_flags = j.at("inconsistency_flags").get<std::vector<std::string>>();
  return rep;
}

}  // namespace autoscore
