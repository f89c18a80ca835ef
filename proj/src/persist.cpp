#include "sdg/persist.hpp"

#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>

#include <json.hpp>

namespace sdg {

namespace {

using nlohmann::json;

json gmm_to_json(const Gmm& g) {
  return json{{"weights", g.weights},
              {"means", g.means},
              {"stddevs", g.stddevs}};
}

json bank_to_json(const MixtureBank& bank) {
  json cells = json::array();
  for (const auto& [key, g] : bank.models) {
    json c = gmm_to_json(g);
    c["month"] = key.month;
    c["slot"] = key.slot;
    cells.push_back(std::move(c));
  }
  return json{{"cells", std::move(cells)},
              {"pooled_fallback", gmm_to_json(bank.pooled_fallback)}};
}

Daytype daytype_from_json(const json& j) {
  std::string s = j.get<std::string>();
  if (s == "weekday") return Daytype::Weekday;
  if (s == "weekend") return Daytype::Weekend;
  throw InvariantError("unknown daytype: " + s);
}

void check(bool ok, const std::string& what) {
  if (!ok) throw InvariantError(what);
}

Gmm gmm_from_json(const json& j, const std::string& where) {
  Gmm g;
  g.weights = j.at("weights").get<std::vector<double>>();
  g.means = j.at("means").get<std::vector<double>>();
  g.stddevs = j.at("stddevs").get<std::vector<double>>();
  check(g.k() >= 1, where + ": empty mixture");
  check(g.means.size() == g.k() && g.stddevs.size() == g.k(),
        where + ": component list lengths differ");
  double wsum = 0.0;
  for (double w : g.weights) {
    check(w > 0.0 && w <= 1.0, where + ": weight outside (0,1]");
    wsum += w;
  }
  check(std::fabs(wsum - 1.0) <= 1e-9, where + ": weights do not sum to 1");
  for (double s : g.stddevs)
    check(s > 0.0 && std::isfinite(s), where + ": non-positive stddev");
  return g;
}

MixtureBank bank_from_json(const json& j, MixtureKind kind,
                           const TimeGrid& grid, const std::string& where) {
  MixtureBank bank;
  bank.kind = kind;
  bank.pooled_fallback =
      gmm_from_json(j.at("pooled_fallback"), where + ".pooled_fallback");
  for (const auto& c : j.at("cells")) {
    int month = c.at("month").get<int>();
    int slot = c.at("slot").get<int>();
    check(month >= 1 && month <= 12, where + ": month out of range");
    check(slot >= 0 && slot < grid.slots_per_day(),
          where + ": slot out of range");
    std::string cell = where + ".cell(" + std::to_string(month) + "," +
                       std::to_string(slot) + ")";
    bank.models[MixKey{month, slot}] = gmm_from_json(c, cell);
  }
  return bank;
}

}  // namespace

std::string model_to_json(const SdgModel& model) {
  json j;
  j["schema_version"] = model.meta.schema_version;
  j["grid"] = json{{"slot_minutes", model.grid.slot_minutes}};
  j["meta"] = json{{"trained_at", model.meta.trained_at},
                   {"n_training_sessions", model.meta.n_training_sessions}};

  json arrival;
  const auto& bounds = model.arrival.bounds();
  arrival["lambda_min"] = bounds.lambda_min;
  arrival["lambda_max"] = bounds.lambda_max;
  arrival["iat_boundary_policy"] =
      model.arrival.iat_boundary == IatBoundaryPolicy::Restart ? "restart"
                                                               : "naive";
  if (model.arrival.is_table()) {
    arrival["mode"] = "table";
    json entries = json::array();
    for (const auto& [key, lambda] :
         std::get<LambdaTable>(model.arrival.rate).values) {
      entries.push_back({{"month", key.month},
                         {"daytype", daytype_name(key.daytype)},
                         {"slot", key.slot},
                         {"lambda", lambda}});
    }
    arrival["entries"] = std::move(entries);
  } else {
    const auto& curve = std::get<LambdaCurve>(model.arrival.rate);
    arrival["mode"] = "curve";
    arrival["order"] = curve.order;
    json curves = json::array();
    for (const auto& [key, fc] : curve.curves) {
      curves.push_back({{"month", key.first},
                        {"daytype", daytype_name(key.second)},
                        {"a0", fc.a0},
                        {"a", fc.a},
                        {"b", fc.b}});
    }
    arrival["curves"] = std::move(curves);
  }
  json family = json::array();
  for (const auto& [key, nb] : model.arrival.counts.negbinom) {
    family.push_back({{"month", key.month},
                      {"daytype", daytype_name(key.daytype)},
                      {"slot", key.slot},
                      {"r", nb.r},
                      {"p", nb.p}});
  }
  arrival["count_family"] = std::move(family);
  j["arrival"] = std::move(arrival);

  j["connected"] = bank_to_json(model.connected);
  j["energy"] = bank_to_json(model.energy);
  return j.dump(2);
}

void save_model(const SdgModel& model, std::ostream& sink) {
  sink << model_to_json(model) << '\n';
  if (!sink) throw PersistError("model write failed");
}

SdgModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelParseError(e.what());
  }

  try {
    std::string version = j.at("schema_version").get<std::string>();
    if (version != "1")
      throw SchemaVersionError("unsupported schema_version: " + version);

    TimeGrid grid(j.at("grid").at("slot_minutes").get<int>());

    SdgModel model{ArrivalModel{LambdaTable{}, CountFamily{}, grid},
                   MixtureBank{}, MixtureBank{}, grid, ModelMeta{}};
    model.meta.schema_version = version;
    model.meta.trained_at = j.at("meta").at("trained_at").get<std::string>();
    model.meta.n_training_sessions =
        j.at("meta").at("n_training_sessions").get<std::uint64_t>();

    const json& ja = j.at("arrival");
    LambdaBounds bounds{ja.at("lambda_min").get<double>(),
                        ja.at("lambda_max").get<double>()};
    check(bounds.lambda_min > 0.0 && bounds.lambda_max > bounds.lambda_min,
          "arrival: invalid lambda bounds");
    std::string policy = ja.at("iat_boundary_policy").get<std::string>();
    check(policy == "restart" || policy == "naive",
          "arrival: unknown iat_boundary_policy");
    model.arrival.iat_boundary = policy == "restart"
                                     ? IatBoundaryPolicy::Restart
                                     : IatBoundaryPolicy::Naive;
    model.arrival.grid = grid;

    std::string mode = ja.at("mode").get<std::string>();
    if (mode == "table") {
      LambdaTable table;
      table.bounds = bounds;
      for (const auto& e : ja.at("entries")) {
        SlotKey key{e.at("month").get<int>(), daytype_from_json(e.at("daytype")),
                    e.at("slot").get<int>()};
        check(key.month >= 1 && key.month <= 12, "arrival: month out of range");
        check(key.slot >= 0 && key.slot < grid.slots_per_day(),
              "arrival: slot out of range");
        double lambda = e.at("lambda").get<double>();
        check(lambda >= bounds.lambda_min && lambda <= bounds.lambda_max,
              "arrival: lambda outside declared bounds");
        table.values[key] = lambda;
      }
      check(table.values.size() == std::size_t(24 * grid.slots_per_day()),
            "arrival: lambda table does not cover the grid");
      model.arrival.rate = std::move(table);
    } else if (mode == "curve") {
      LambdaCurve curve;
      curve.bounds = bounds;
      curve.order = ja.at("order").get<int>();
      check(curve.order >= 0, "arrival: negative Fourier order");
      for (const auto& e : ja.at("curves")) {
        FourierCurve fc;
        fc.a0 = e.at("a0").get<double>();
        fc.a = e.at("a").get<std::vector<double>>();
        fc.b = e.at("b").get<std::vector<double>>();
        check(fc.a.size() == std::size_t(curve.order) &&
                  fc.b.size() == std::size_t(curve.order),
              "arrival: curve coefficient count mismatch");
        int month = e.at("month").get<int>();
        check(month >= 1 && month <= 12, "arrival: month out of range");
        curve.curves[{month, daytype_from_json(e.at("daytype"))}] = fc;
      }
      check(curve.curves.size() == 24,
            "arrival: curve set does not cover (month, daytype)");
      model.arrival.rate = std::move(curve);
    } else {
      throw InvariantError("arrival: unknown mode " + mode);
    }

    for (const auto& e : ja.at("count_family")) {
      SlotKey key{e.at("month").get<int>(), daytype_from_json(e.at("daytype")),
                  e.at("slot").get<int>()};
      NegBinom nb{e.at("r").get<double>(), e.at("p").get<double>()};
      check(nb.r > 0.0, "count_family: r must be positive");
      check(nb.p > 0.0 && nb.p < 1.0, "count_family: p outside (0,1)");
      model.arrival.counts.negbinom[key] = nb;
    }

    model.connected = bank_from_json(j.at("connected"),
                                     MixtureKind::ConnectedTime, grid,
                                     "connected");
    model.energy =
        bank_from_json(j.at("energy"), MixtureKind::Energy, grid, "energy");
    return model;
  } catch (const json::exception& e) {
    throw ModelParseError(e.what());
  }
}

SdgModel load_model(std::istream& source) {
  std::string text((std::istreambuf_iterator<char>(source)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace sdg
