#include "ns/model_io.hpp"

#include <json.hpp>

#include "ns/errors.hpp"

namespace ns {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* kind_name(PrimitiveKind kind) {
    switch (kind) {
        case PrimitiveKind::Constant: return "constant";
        case PrimitiveKind::Linear: return "linear";
        case PrimitiveKind::Quadratic: return "quadratic";
        case PrimitiveKind::Harmonic: return "harmonic";
        case PrimitiveKind::ExpDecay: return "exp_decay";
        case PrimitiveKind::LogShift: return "log_shift";
    }
    return "unknown";
}

PrimitiveKind kind_from_name(const std::string& name) {
    if (name == "constant") return PrimitiveKind::Constant;
    if (name == "linear") return PrimitiveKind::Linear;
    if (name == "quadratic") return PrimitiveKind::Quadratic;
    if (name == "harmonic") return PrimitiveKind::Harmonic;
    if (name == "exp_decay") return PrimitiveKind::ExpDecay;
    if (name == "log_shift") return PrimitiveKind::LogShift;
    throw ArgumentError("model descriptor: unknown factor kind '" + name + "'");
}

ordered_json factor_to_json(const Factor& factor, const ParamRecord& params) {
    ordered_json out;
    out["kind"] = kind_name(factor.kind);
    switch (factor.kind) {
        case PrimitiveKind::Harmonic:
            out["part"] = factor.part == HarmonicPart::Cos ? "cos" : "sin";
            out["omega"] = params.omega;
            break;
        case PrimitiveKind::ExpDecay:
            out["gamma"] = params.gamma;
            break;
        case PrimitiveKind::LogShift:
            out["tau"] = params.tau;
            break;
        default: break;
    }
    return out;
}

ordered_json channel_to_json(const std::string& name, const ChannelFit& fit) {
    ordered_json out;
    out["name"] = name;
    ordered_json terms = ordered_json::array();
    for (std::size_t j = 0; j < fit.model.terms.size(); ++j) {
        ordered_json term;
        ordered_json factors = ordered_json::array();
        for (const Factor& f : fit.model.terms[j].factors())
            factors.push_back(factor_to_json(f, fit.model.params));
        term["factors"] = std::move(factors);
        term["coefficient"] = fit.model.coefficients[j];
        terms.push_back(std::move(term));
    }
    out["terms"] = std::move(terms);
    out["rmse"] = fit.model.rmse;
    out["condition_estimate"] = fit.model.condition_estimate;
    out["data_scale"] = fit.data_scale;
    out["accepted"] = fit.accepted;
    out["converged"] = fit.model.converged;
    out["candidates_evaluated"] = fit.candidates_evaluated;
    return out;
}

ChannelFit channel_from_json(const nlohmann::json& channel) {
    ChannelFit fit;
    ParamRecord params;
    std::vector<BasisTerm> terms;
    std::vector<double> coefficients;
    for (const auto& term : channel.at("terms")) {
        std::vector<Factor> factors;
        for (const auto& f : term.at("factors")) {
            Factor factor;
            factor.kind = kind_from_name(f.at("kind").get<std::string>());
            if (factor.kind == PrimitiveKind::Harmonic) {
                const auto part = f.at("part").get<std::string>();
                if (part != "cos" && part != "sin")
                    throw ArgumentError("model descriptor: harmonic part must be cos or sin");
                factor.part = part == "cos" ? HarmonicPart::Cos : HarmonicPart::Sin;
                params.omega = f.at("omega").get<double>();
            } else if (factor.kind == PrimitiveKind::ExpDecay) {
                params.gamma = f.at("gamma").get<double>();
            } else if (factor.kind == PrimitiveKind::LogShift) {
                params.tau = f.at("tau").get<double>();
            }
            factors.push_back(factor);
        }
        terms.emplace_back(std::move(factors));
        coefficients.push_back(term.at("coefficient").get<double>());
    }
    fit.model.terms = std::move(terms);
    fit.model.coefficients = std::move(coefficients);
    fit.model.params = params;
    fit.model.rmse = channel.at("rmse").get<double>();
    fit.model.condition_estimate = channel.at("condition_estimate").get<double>();
    fit.model.converged = channel.at("converged").get<bool>();
    fit.data_scale = channel.at("data_scale").get<double>();
    fit.accepted = channel.at("accepted").get<bool>();
    fit.candidates_evaluated = channel.at("candidates_evaluated").get<long>();
    return fit;
}

}  // namespace

std::string to_json(const ModelDescriptor& descriptor) {
    ordered_json out;
    out["format"] = "ns-model";
    out["version"] = 1;
    ordered_json window;
    window["t_start"] = descriptor.t_start;
    window["t_end"] = descriptor.t_end;
    window["sample_rate"] = descriptor.sample_rate;
    out["fit_window"] = std::move(window);
    ordered_json channels = ordered_json::array();
    for (std::size_t c = 0; c < descriptor.result.channel_names.size(); ++c)
        channels.push_back(
            channel_to_json(descriptor.result.channel_names[c], descriptor.result.channels[c]));
    out["channels"] = std::move(channels);
    if (descriptor.provenance) {
        ordered_json prov;
        for (const auto& [key, value] : *descriptor.provenance) prov[key] = value;
        out["provenance"] = std::move(prov);
    }
    return out.dump(2) + "\n";
}

ModelDescriptor model_from_json(std::string_view json) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("model descriptor: invalid JSON: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "ns-model")
            throw ArgumentError("model descriptor: unexpected format tag");
        if (doc.at("version").get<int>() != 1)
            throw ArgumentError("model descriptor: unsupported version");
        ModelDescriptor out;
        out.t_start = doc.at("fit_window").at("t_start").get<double>();
        out.t_end = doc.at("fit_window").at("t_end").get<double>();
        out.sample_rate = doc.at("fit_window").at("sample_rate").get<double>();
        for (const auto& channel : doc.at("channels")) {
            out.result.channel_names.push_back(channel.at("name").get<std::string>());
            out.result.channels.push_back(channel_from_json(channel));
        }
        if (doc.contains("provenance")) {
            std::map<std::string, std::string> prov;
            for (const auto& [key, value] : doc["provenance"].items())
                prov[key] = value.get<std::string>();
            out.provenance = std::move(prov);
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("model descriptor: missing or mistyped field: ") +
                            e.what());
    }
}

}  // namespace ns
