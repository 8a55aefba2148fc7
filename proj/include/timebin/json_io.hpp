// Copyright 2026 The timebin Authors
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

// Result serialization. Output is written by hand so that field order and
// number formatting (17 significant digits) are fixed byte for byte; reading
// measured tables goes through nlohmann::json.

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "timebin/analysis.hpp"
#include "timebin/program.hpp"

namespace timebin {

inline constexpr int kJsonSchema = 1;

namespace detail {

inline std::string json_number(double x) {
    if (!std::isfinite(x)) throw DomainError("non-finite number in JSON output");
    return fmt::format("{:.17g}", x);
}

inline std::string json_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

template <typename T, typename F>
std::string json_array(const std::vector<T>& items, F&& each) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += each(items[i]);
    }
    return out + "]";
}

inline std::string json_counts(const std::vector<unsigned>& counts) {
    return json_array(counts, [](unsigned n) { return std::to_string(n); });
}

inline std::string json_rows(const TruthTable& t, const std::string& indent) {
    std::string out = "[\n";
    for (int i = 0; i < 4; ++i) {
        out += indent + "  [";
        for (int o = 0; o < 4; ++o) {
            if (o) out += ", ";
            out += json_number(t(i, o));
        }
        out += i < 3 ? "],\n" : "]\n";
    }
    return out + indent + "]";
}

}  // namespace detail

/// Multinomial draw summary attached to a run.
struct SampleSummary {
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::map<std::vector<unsigned>, std::uint64_t> hits;
};

inline std::string to_json(const RunResult& r, const SampleSummary* samples = nullptr) {
    std::string out = "{\n";
    out += fmt::format("  \"schema\": {},\n", kJsonSchema);
    out += fmt::format("  \"program_hash\": \"{:016x}\",\n", r.program_hash);
    out += "  \"modes\": " + detail::json_array(r.modes, [](const std::string& m) { return detail::json_string(m); }) +
           ",\n";
    out += "  \"distribution\": [";
    bool first = true;
    for (const auto& [key, p] : r.distribution.entries()) {
        out += first ? "\n" : ",\n";
        first = false;
        out += "    {\"counts\": " + detail::json_counts(key) + ", \"probability\": " + detail::json_number(p) + "}";
    }
    out += first ? "],\n" : "\n  ],\n";
    out += "  \"success_probability\": " + detail::json_number(r.success_probability) + ",\n";
    out += "  \"norm_trace\": " + detail::json_array(r.norm_trace, [](double x) { return detail::json_number(x); });
    if (samples) {
        out += ",\n  \"samples\": {\n";
        out += fmt::format("    \"shots\": {},\n    \"seed\": {},\n    \"histogram\": [", samples->shots, samples->seed);
        bool f = true;
        for (const auto& [key, n] : samples->hits) {
            out += f ? "\n" : ",\n";
            f = false;
            out += "      {\"counts\": " + detail::json_counts(key) + ", \"hits\": " + std::to_string(n) + "}";
        }
        out += f ? "]\n  }" : "\n    ]\n  }";
    }
    return out + "\n}\n";
}

/// Header row, then one row per input pair in index order 00, 01, 10, 11.
inline std::string to_csv(const TruthTable& t) {
    std::string out = "input";
    for (int o = 0; o < 4; ++o) out += "," + t.basis_out.label(o);
    out += '\n';
    for (int i = 0; i < 4; ++i) {
        out += t.basis_in.label(i);
        for (int o = 0; o < 4; ++o) out += "," + detail::json_number(t(i, o));
        out += '\n';
    }
    return out;
}

inline std::string table_json(const TruthTable& t, const std::string& indent) {
    std::string out = indent + "{\n";
    out += indent + "  \"basis_in\": " + detail::json_string(t.basis_in.str()) + ",\n";
    out += indent + "  \"basis_out\": " + detail::json_string(t.basis_out.str()) + ",\n";
    out += indent + "  \"rows\": " + detail::json_rows(t, indent + "  ") + "\n";
    return out + indent + "}";
}

/// A list of tables in the measured-data layout.
inline std::string tables_to_json(const std::vector<TruthTable>& tables) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < tables.size(); ++i) {
        out += table_json(tables[i], "  ");
        out += i + 1 < tables.size() ? ",\n" : "\n";
    }
    return out + "]\n";
}

inline std::string to_json(const FidelityReport& r) {
    std::string out = "{\n";
    out += fmt::format("  \"schema\": {},\n", kJsonSchema);
    out += "  \"f_ha\": " + detail::json_number(r.f_ha) + ",\n";
    out += "  \"f_ah\": " + detail::json_number(r.f_ah) + ",\n";
    out += "  \"f_aa\": " + detail::json_number(r.f_aa) + ",\n";
    out += "  \"process_lower\": " + detail::json_number(r.process_lower) + ",\n";
    out += "  \"process_upper\": " + detail::json_number(r.process_upper) + ",\n";
    out += std::string("  \"nonclassical\": ") + (r.nonclassical ? "true" : "false") + "\n";
    return out + "}\n";
}

inline std::string to_json(const AlphaFit& f) {
    std::string out = "{\n";
    out += fmt::format("  \"schema\": {},\n", kJsonSchema);
    out += "  \"alpha\": " + detail::json_number(f.alpha) + ",\n";
    out += "  \"l1_distance\": " + detail::json_number(f.l1_distance) + "\n";
    return out + "}\n";
}

/// Parses a list of {basis_in, basis_out, rows: 4x4}.
inline std::vector<TruthTable> tables_from_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("tables file is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw DomainError("tables file must hold a list of tables");
    std::vector<TruthTable> out;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("basis_in") || !item.contains("basis_out") || !item.contains("rows")) {
            throw DomainError("each table needs basis_in, basis_out and rows");
        }
        TruthTable t;
        t.basis_in = BasisPair::parse(item.at("basis_in").get<std::string>());
        t.basis_out = BasisPair::parse(item.at("basis_out").get<std::string>());
        const auto& rows = item.at("rows");
        if (!rows.is_array() || rows.size() != 4) throw DomainError("rows must be a 4x4 array");
        for (std::size_t i = 0; i < 4; ++i) {
            if (!rows[i].is_array() || rows[i].size() != 4) throw DomainError("rows must be a 4x4 array");
            for (std::size_t o = 0; o < 4; ++o) {
                if (!rows[i][o].is_number()) throw DomainError("table entries must be numbers");
                t.probabilities[i][o] = rows[i][o].get<double>();
            }
        }
        out.push_back(t);
    }
    return out;
}

}  // namespace timebin
