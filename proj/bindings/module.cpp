#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relaycode/coding.hpp"
#include "relaycode/field.hpp"
#include "relaycode/markov.hpp"
#include "relaycode/simulator.hpp"
#include "relaycode/systematic.hpp"

namespace py = pybind11;
using namespace relaycode;

namespace {

ChannelParams make_params(unsigned m, double p1, double p2, double p3) {
    ChannelParams params{p1, p2, p3, m};
    params.validate();
    return params;
}

SimConfig make_config(unsigned m, double p1, double p2, double p3, const std::string& relay,
                      const std::string& field, bool relay_lag, std::uint64_t trials,
                      std::uint64_t seed) {
    SimConfig config;
    config.params = make_params(m, p1, p2, p3);
    if (relay == "systematic")
        config.relay_policy = RelayPolicy::systematic;
    else if (relay == "non-systematic" || relay == "non_systematic")
        config.relay_policy = RelayPolicy::non_systematic;
    else
        throw std::invalid_argument("relay must be systematic or non-systematic");
    if (field == "inf" || field == "infinite") {
        config.field_mode = FieldMode::infinite_field();
    } else {
        unsigned exponent = 0;
        if (std::sscanf(field.c_str(), "2^%u", &exponent) != 1)
            throw std::invalid_argument("field must be inf or 2^m");
        config.field_mode = FieldMode::finite(exponent);
    }
    config.relay_lag = relay_lag;
    config.trials = trials;
    config.master_seed = seed;
    return config;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Exact analysis and Monte-Carlo simulation of systematic vs non-systematic "
                "relaying in a network-coded erasure relay channel";

    py::register_exception<NeverCompletesError>(mod, "NeverCompletesError");

    py::class_<GaloisField>(mod, "GaloisField")
        .def(py::init<unsigned, unsigned>(), py::arg("m"), py::arg("reduction_polynomial"))
        .def_static("default_field", &GaloisField::default_field)
        .def_static("default_polynomial", &GaloisField::default_polynomial)
        .def_property_readonly("m", &GaloisField::m)
        .def_property_readonly("size", &GaloisField::size)
        .def("add", &GaloisField::add)
        .def("mul", &GaloisField::mul)
        .def("inv", &GaloisField::inv)
        .def("div", &GaloisField::div);

    py::class_<Packet>(mod, "Packet")
        .def(py::init<>())
        .def_readwrite("coding_vector", &Packet::coding_vector)
        .def_readwrite("payload", &Packet::payload)
        .def("is_uncoded", [](const Packet& p) { return p.is_uncoded(); });

    py::class_<Decoder>(mod, "Decoder")
        .def(py::init<const GaloisField&, std::size_t, std::size_t>(), py::arg("field"),
             py::arg("packet_count"), py::arg("payload_symbols"), py::keep_alive<1, 2>())
        .def("receive", &Decoder::receive)
        .def_property_readonly("rank", &Decoder::rank)
        .def_property_readonly("complete", &Decoder::complete)
        .def_property_readonly("uncoded_indices",
                               [](const Decoder& d) {
                                   return std::vector<std::size_t>(d.uncoded_indices().begin(),
                                                                   d.uncoded_indices().end());
                               })
        .def("decode", &Decoder::decode);

    mod.def(
        "encode",
        [](const GaloisField& gf, const std::vector<std::vector<Symbol>>& originals,
           const std::vector<Symbol>& coefficients) { return encode(gf, originals, coefficients); },
        py::arg("field"), py::arg("originals"), py::arg("coefficients"));

    mod.def("decoding_cost", &decoding_cost, py::arg("m"), py::arg("u"));

    mod.def(
        "t_non_sys",
        [](unsigned m, double p1, double p2, double p3) {
            return t_non_sys(make_params(m, p1, p2, p3));
        },
        py::arg("m"), py::arg("p1"), py::arg("p2"), py::arg("p3"));

    mod.def(
        "t_sys",
        [](unsigned m, double p1, double p2, double p3) { return t_sys(make_params(m, p1, p2, p3)); },
        py::arg("m"), py::arg("p1"), py::arg("p2"), py::arg("p3"));

    mod.def(
        "expected_uncoded_gain",
        [](unsigned m, double p1, double p2, double p3) {
            const UncodedGain g = expected_uncoded_gain(make_params(m, p1, p2, p3));
            return py::make_tuple(g.expected_gain, g.fraction);
        },
        py::arg("m"), py::arg("p1"), py::arg("p2"), py::arg("p3"),
        "Returns (expected_gain, fraction).");

    mod.def(
        "completion_times",
        [](unsigned m, double p1, double p2, double p3) {
            py::dict out;
            for (const auto& [state, t] : solve_completion_times(make_params(m, p1, p2, p3)))
                out[py::make_tuple(state.i, state.j, state.k)] = t;
            return out;
        },
        py::arg("m"), py::arg("p1"), py::arg("p2"), py::arg("p3"));

    mod.def(
        "first_stage_distribution",
        [](unsigned m, double p1, double p2, double p3) {
            py::dict out;
            for (const auto& [state, q] : first_stage_distribution(make_params(m, p1, p2, p3)))
                out[py::make_tuple(state.i, state.j, state.k)] = q;
            return out;
        },
        py::arg("m"), py::arg("p1"), py::arg("p2"), py::arg("p3"));

    mod.def(
        "run_batch",
        [](unsigned m, double p1, double p2, double p3, const std::string& relay,
           const std::string& field, std::uint64_t trials, std::uint64_t seed, bool relay_lag) {
            const BatchResult b = run_batch(
                make_config(m, p1, p2, p3, relay, field, relay_lag, trials, seed));
            py::dict out;
            out["mean_completion"] = b.mean_completion;
            out["stderr_completion"] = b.stderr_completion;
            out["mean_u"] = b.mean_u;
            out["stderr_u"] = b.stderr_u;
            out["trials"] = b.trials;
            return out;
        },
        py::arg("m"), py::arg("p1"), py::arg("p2"), py::arg("p3"), py::arg("relay"),
        py::arg("field") = "inf", py::arg("trials") = 10000, py::arg("seed") = 0,
        py::arg("relay_lag") = false);

    mod.def(
        "measure_uncoded_gap",
        [](unsigned m, double p1, double p2, double p3, const std::string& field,
           std::uint64_t trials, std::uint64_t seed, bool relay_lag) {
            const SimConfig sys_config =
                make_config(m, p1, p2, p3, "systematic", field, relay_lag, trials, seed);
            SimConfig non_config = sys_config;
            non_config.relay_policy = RelayPolicy::non_systematic;
            return measure_uncoded_gap(sys_config, non_config);
        },
        py::arg("m"), py::arg("p1"), py::arg("p2"), py::arg("p3"), py::arg("field") = "inf",
        py::arg("trials") = 10000, py::arg("seed") = 0, py::arg("relay_lag") = false);

    mod.def(
        "analyze",
        [](unsigned m, double p1, double p2, double p3, const std::string& relay) {
            const ChannelParams params = make_params(m, p1, p2, p3);
            double t_mean;
            if (relay == "systematic")
                t_mean = t_sys(params);
            else if (relay == "non-systematic" || relay == "non_systematic")
                t_mean = t_non_sys(params);
            else
                throw std::invalid_argument("relay must be systematic or non-systematic");
            const UncodedGain gain = expected_uncoded_gain(params);
            py::dict out;
            out["report"] = "analyze";
            out["m"] = m;
            out["p1"] = p1;
            out["p2"] = p2;
            out["p3"] = p3;
            out["relay"] = relay == "systematic" ? "systematic" : "non-systematic";
            out["t_mean"] = t_mean;
            out["t_per_packet"] = t_mean / m;
            out["uncoded_gain"] = gain.expected_gain;
            out["uncoded_fraction"] = gain.fraction;
            return out;
        },
        py::arg("m"), py::arg("p1"), py::arg("p2"), py::arg("p3"),
        py::arg("relay") = "systematic",
        "Exact analysis report with the same fields as the CLI analyze subcommand.");
}
