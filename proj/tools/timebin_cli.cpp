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


// timebin-cli: runs .tbl programs and the gate analyses from the command
// line. Exit status 0 on success, 1 on a domain or input error, 2 on a usage
// error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "timebin/timebin.hpp"

namespace {

using namespace timebin;

const std::vector<std::string> kTableGates{"cphase-postselected", "cphase-klm", "cphase-ideal", "identity"};
const std::vector<std::string> kDemoGates{"cphase-postselected", "cphase-klm", "fusion-1", "fusion-2"};

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write " + path);
    out << text;
}

std::vector<TruthTable> read_tables(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    return tables_from_json(in);
}

SampleSummary sample(const Distribution& d, std::uint64_t shots, std::uint64_t seed) {
    SampleSummary s{shots, seed, {}};
    if (d.empty()) return s;
    std::vector<std::vector<unsigned>> keys;
    std::vector<double> weights;
    for (const auto& [k, p] : d.entries()) {
        keys.push_back(k);
        weights.push_back(p);
    }
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    for (const auto& k : keys) s.hits[k] = 0;
    for (std::uint64_t i = 0; i < shots; ++i) ++s.hits[keys[pick(rng)]];
    return s;
}

// Mixture fidelity with the ideal CPhase output.
double cphase_fidelity(const GateRun& run, const PolarizationQubit& c, const PolarizationQubit& t) {
    const auto ideal = apply_cphase(product_amplitudes(c, t));
    double total = 0;
    double f = 0;
    for (const auto& b : run.branches) {
        double n = 0;
        for (const auto& a : b) n += std::norm(a);
        total += n;
        Complex ov{};
        for (std::size_t k = 0; k < 4; ++k) ov += std::conj(ideal[k]) * b[k];
        f += std::norm(ov);
    }
    return total > 0 ? f / total : 0.0;
}

std::string cphase_demo(const std::string& name, double alpha) {
    const auto gate = gate_by_name(name, alpha);
    const std::string labels = "HVDARL";
    std::string out = fmt::format("{{\n  \"schema\": {},\n  \"gate\": \"{}\",\n  \"alpha\": {},\n  \"inputs\": [",
                                  kJsonSchema, name, detail::json_number(alpha));
    bool first = true;
    for (char a : labels) {
        for (char b : labels) {
            const auto c = PolarizationQubit::from_label(a);
            const auto t = PolarizationQubit::from_label(b);
            const GateRun run = gate(c, t);
            out += first ? "\n" : ",\n";
            first = false;
            out += fmt::format("    {{\"control\": \"{}\", \"target\": \"{}\", \"success_probability\": {}, \"fidelity\": {}}}",
                               a, b, detail::json_number(run.success_probability),
                               detail::json_number(cphase_fidelity(run, c, t)));
        }
    }
    return out + "\n  ]\n}\n";
}

std::string fusion_demo_json(const std::string& name) {
    const FockState input = fusion_demo_input();
    const FusionOutcome f = name == "fusion-1" ? fusion_type1(input, fusion_demo::kA, fusion_demo::kB)
                                               : fusion_type2(input, fusion_demo::kA, fusion_demo::kB);
    std::string out = fmt::format("{{\n  \"schema\": {},\n  \"gate\": \"{}\",\n  \"detectors\": ", kJsonSchema, name);
    out += detail::json_array(f.detectors, [](const ModeIndex& m) { return detail::json_string(to_string(m)); });
    out += ",\n  \"branches\": [";
    bool first = true;
    for (const auto& b : f.branches) {
        out += first ? "\n" : ",\n";
        first = false;
        out += "    {\"pattern\": " + detail::json_counts(b.pattern) +
               ", \"probability\": " + detail::json_number(b.probability) +
               ", \"success\": " + (b.success ? "true" : "false") + "}";
    }
    out += "\n  ],\n  \"success_probability\": " + detail::json_number(f.success_probability);
    out += ",\n  \"total_probability\": " + detail::json_number(f.total_probability()) + "\n}\n";
    return out;
}

// The KLM gate on input |1>|1> as a program.
Program klm_program() {
    Program p;
    p.modes.bins = klm::kBins;
    for (std::uint32_t bin : {klm::kControl.late, klm::kTarget.late, klm::kPhotonA, klm::kPhotonB}) {
        p.statements.push_back({stmt::Photon{bin, kV, 0, 0}, {}});
    }
    for (const auto& op : klm_cphase_sequence()) p.statements.push_back({statement_from_element(op), {}});
    for (const auto& e : klm_herald_events()) {
        p.statements.push_back(
            {stmt::Herald{e.mode.time_bin, e.mode.polarization, e.count}, {}});
    }
    p.statements.push_back({stmt::Read{klm::kControl.late, kV}, {}});
    p.statements.push_back({stmt::Read{klm::kTarget.late, kV}, {}});
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-bin linear optics simulator"};
    app.require_subcommand(1);

    std::string out_path;
    double alpha = 1.0;

    auto* run_cmd = app.add_subcommand("run", "Run a .tbl program");
    std::string program_path;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    run_cmd->add_option("program", program_path, "Program file")->required();
    run_cmd->add_option("--out", out_path, "Output JSON path");
    run_cmd->add_option("--shots", shots, "Draw this many samples from the exact distribution");
    run_cmd->add_option("--seed", seed, "Sampling seed");

    auto* table_cmd = app.add_subcommand("truth-table", "Simulate a truth table");
    std::string gate_name = "cphase-postselected";
    std::string basis_in = "HV,HV";
    std::string basis_out = "HV,HV";
    std::string table_format = "csv";
    bool standard_set = false;
    table_cmd->add_option("--gate", gate_name, "Gate name")->check(CLI::IsMember(kTableGates));
    table_cmd->add_option("--basis-in", basis_in, "Input bases, e.g. HV,AD");
    table_cmd->add_option("--basis-out", basis_out, "Output bases, e.g. HV,AD");
    table_cmd->add_option("--alpha", alpha, "Photon overlap");
    table_cmd->add_option("--format", table_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    table_cmd->add_flag("--standard-set", standard_set, "Emit the HA, AH and AA tables as JSON");
    table_cmd->add_option("--out", out_path, "Output path");

    auto* fid_cmd = app.add_subcommand("fidelity", "Classical fidelities and process bounds");
    std::string measured_path;
    auto* fid_alpha = fid_cmd->add_option("--alpha", alpha, "Simulate at this overlap");
    auto* fid_measured = fid_cmd->add_option("--measured", measured_path, "Tables file (HA, AH, AA)");
    fid_alpha->excludes(fid_measured);
    fid_cmd->add_option("--out", out_path, "Output JSON path");

    auto* fit_cmd = app.add_subcommand("fit-alpha", "Fit the photon overlap to measured tables");
    int steps = 1000;
    fit_cmd->add_option("--measured", measured_path, "Tables file")->required();
    fit_cmd->add_option("--steps", steps, "Grid resolution")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--out", out_path, "Output JSON path");

    auto* demo_cmd = app.add_subcommand("demo", "Run one of the gate constructions");
    std::string demo_gate;
    std::string emit_program;
    demo_cmd->add_option("gate", demo_gate, "Gate name")->required()->check(CLI::IsMember(kDemoGates));
    demo_cmd->add_option("--alpha", alpha, "Photon overlap (cphase-postselected)");
    demo_cmd->add_option("--out", out_path, "Output JSON path");
    demo_cmd->add_option("--program", emit_program, "Also write the cphase-klm circuit as a .tbl program");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run_cmd) {
            const RunResult r = run(parse(read_text(program_path)));
            if (shots > 0) {
                const SampleSummary s = sample(r.distribution, shots, seed);
                emit(to_json(r, &s), out_path);
            } else {
                emit(to_json(r), out_path);
            }
        } else if (*table_cmd) {
            const auto gate = gate_by_name(gate_name, alpha);
            if (standard_set) {
                emit(tables_to_json(standard_tables(gate)), out_path);
            } else {
                const auto t = truth_table(gate, BasisPair::parse(basis_in), BasisPair::parse(basis_out));
                emit(table_format == "csv" ? to_csv(t) : tables_to_json({t}), out_path);
            }
        } else if (*fid_cmd) {
            if (!measured_path.empty()) {
                emit(to_json(report_from_tables(read_tables(measured_path))), out_path);
            } else {
                emit(to_json(simulate_report(alpha)), out_path);
            }
        } else if (*fit_cmd) {
            const auto tables = read_tables(measured_path);
            AlphaGrid grid(steps);
            emit(to_json(fit_alpha(tables, grid)), out_path);
        } else if (*demo_cmd) {
            if (!emit_program.empty()) {
                if (demo_gate != "cphase-klm") throw DomainError("--program is only available for cphase-klm");
                emit("# KLM CPhase on |1>|1>, heralded by the two ancilla photons\n" + format(klm_program()),
                     emit_program);
            }
            if (demo_gate.rfind("fusion", 0) == 0) {
                emit(fusion_demo_json(demo_gate), out_path);
            } else {
                emit(cphase_demo(demo_gate, alpha), out_path);
            }
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
