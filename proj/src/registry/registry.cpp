#include "socketstore/registry/registry.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

namespace socketstore::registry {

using core::Errc;
using core::Error;
using core::Json;
using core::Lifecycle;

RegistryConfig RegistryConfig::from_json(const Json& j) {
  RegistryConfig c;
  if (!j.is_object()) return c;
  if (j.contains("secret") && j["secret"].is_string()) c.secret = j["secret"];
  if (j.contains("weight_stars")) c.weight_stars = j["weight_stars"].get<double>();
  if (j.contains("weight_attainment")) c.weight_attainment = j["weight_attainment"].get<double>();
  if (j.contains("weight_popularity")) c.weight_popularity = j["weight_popularity"].get<double>();
  if (j.contains("disposal_max_attainment")) {
    c.disposal_max_attainment = j["disposal_max_attainment"].get<double>();
  }
  if (j.contains("disposal_min_samples")) {
    c.disposal_min_samples = j["disposal_min_samples"].get<std::int64_t>();
  }
  if (j.contains("maintenance_grace_ms")) {
    c.maintenance_grace_ms = j["maintenance_grace_ms"].get<std::int64_t>();
  }
  return c;
}

Json RegistryConfig::to_json() const {
  return Json{{"secret", secret},
              {"weight_stars", weight_stars},
              {"weight_attainment", weight_attainment},
              {"weight_popularity", weight_popularity},
              {"disposal_max_attainment", disposal_max_attainment},
              {"disposal_min_samples", disposal_min_samples},
              {"maintenance_grace_ms", maintenance_grace_ms}};
}

Json ObjectiveStats::to_json() const {
  return Json{{"samples", samples},
              {"attained", attained},
              {"last_maintainer_update", last_maintainer_update_ms}};
}

ObjectiveStats ObjectiveStats::from_json(const Json& j) {
  ObjectiveStats s;
  if (j.contains("samples")) s.samples = j["samples"].get<std::int64_t>();
  if (j.contains("attained")) s.attained = j["attained"].get<std::int64_t>();
  if (j.contains("last_maintainer_update")) {
    s.last_maintainer_update_ms = j["last_maintainer_update"].get<std::int64_t>();
  }
  return s;
}

Lifecycle ModuleRecord::lifecycle() const {
  if (disposed) return Lifecycle::disposed;
  if (pending) return pending->lifecycle;
  if (active) return active->lifecycle;
  return Lifecycle::submitted;
}

Json ModuleRecord::to_json() const {
  Json j = Json::object();
  if (active) j["active"] = active->to_json();
  if (pending) j["pending"] = pending->to_json();
  j["disposed"] = disposed;
  return j;
}

core::Result<ModuleRecord> ModuleRecord::from_json(const Json& j) {
  ModuleRecord rec;
  if (j.contains("active")) {
    auto d = core::ModuleDescriptor::from_json(j["active"]);
    if (!d) return d.error();
    rec.active = std::move(d).value();
  }
  if (j.contains("pending")) {
    auto d = core::ModuleDescriptor::from_json(j["pending"]);
    if (!d) return d.error();
    rec.pending = std::move(d).value();
  }
  if (j.contains("disposed")) rec.disposed = j["disposed"].get<bool>();
  return rec;
}

Json ToReply::to_json() const {
  Json j = Json::object();
  switch (status) {
    case Status::up_to_date: j["status"] = "up_to_date"; break;
    case Status::new_to: j["status"] = "new_to"; break;
    case Status::default_device: j["status"] = "default_device"; break;
  }
  if (to) j["to"] = to->to_json();
  j["version"] = version;
  j["module_ids"] = module_ids;
  j["has_network_behavior"] = has_network_behavior;
  return j;
}

core::Result<ToReply> ToReply::from_json(const Json& j) {
  ToReply reply;
  if (!j.contains("status") || !j["status"].is_string()) {
    return Error{Errc::protocol_error, "ToReply missing status"};
  }
  const std::string status = j["status"];
  if (status == "up_to_date") {
    reply.status = Status::up_to_date;
  } else if (status == "new_to") {
    reply.status = Status::new_to;
  } else if (status == "default_device") {
    reply.status = Status::default_device;
  } else {
    return Error{Errc::protocol_error, "unknown ToReply status"};
  }
  if (j.contains("to")) {
    auto to = core::TransferableObject::from_json(j["to"]);
    if (!to) return to.error();
    reply.to = std::move(to).value();
  }
  if (j.contains("version")) reply.version = j["version"].get<std::int64_t>();
  if (j.contains("module_ids")) reply.module_ids = j["module_ids"].get<std::vector<std::string>>();
  if (j.contains("has_network_behavior")) {
    reply.has_network_behavior = j["has_network_behavior"].get<bool>();
  }
  return reply;
}

Json ModuleInfo::to_json() const {
  Json j{{"module_key", module_key},
         {"version", version},
         {"lifecycle", core::lifecycle_name(lifecycle)},
         {"objective", objective.to_json()},
         {"composed_of", composed_of}};
  if (network_behavior_id) j["network_behavior_id"] = *network_behavior_id;
  Json params = Json::object();
  for (const auto& [id, pset] : parameterizations) params[id] = pset.to_json();
  j["parameterizations"] = std::move(params);
  return j;
}

core::Result<ModuleInfo> ModuleInfo::from_json(const Json& j) {
  ModuleInfo info;
  if (!j.contains("module_key") || !j["module_key"].is_string()) {
    return Error{Errc::protocol_error, "ModuleInfo missing module_key"};
  }
  info.module_key = j["module_key"];
  if (j.contains("version")) info.version = j["version"].get<std::int64_t>();
  if (j.contains("lifecycle") && j["lifecycle"].is_string()) {
    auto state = core::lifecycle_from_name(j["lifecycle"].get<std::string>());
    if (!state) return Error{Errc::protocol_error, "unknown lifecycle"};
    info.lifecycle = *state;
  }
  if (j.contains("objective")) {
    auto obj = core::PerformanceObjective::from_json(j["objective"]);
    if (!obj) return obj.error();
    info.objective = obj.value();
  }
  if (j.contains("network_behavior_id") && j["network_behavior_id"].is_string()) {
    info.network_behavior_id = j["network_behavior_id"].get<std::string>();
  }
  if (j.contains("parameterizations") && j["parameterizations"].is_object()) {
    for (const auto& [id, pj] : j["parameterizations"].items()) {
      auto pset = core::ParameterSet::from_json(pj);
      if (!pset) return pset.error();
      info.parameterizations[id] = std::move(pset).value();
    }
  }
  if (j.contains("composed_of")) {
    info.composed_of = j["composed_of"].get<std::vector<std::string>>();
  }
  return info;
}

std::vector<Lifecycle> lifecycle_targets(Lifecycle from) {
  switch (from) {
    case Lifecycle::submitted:
      return {Lifecycle::under_review};
    case Lifecycle::under_review:
      return {Lifecycle::published, Lifecycle::revision_requested};
    case Lifecycle::revision_requested:
      return {Lifecycle::under_review};
    case Lifecycle::published:
      return {Lifecycle::under_review, Lifecycle::deprecated};
    case Lifecycle::deprecated:
      return {Lifecycle::under_review, Lifecycle::disposed};
    case Lifecycle::disposed:
      return {};  // terminal
  }
  return {};
}

Registry::Registry(RegistryConfig config) : config_(std::move(config)) {}

core::Result<std::unique_ptr<Registry>> Registry::open(RegistryConfig config,
                                                       const std::string& log_path) {
  auto reg = std::make_unique<Registry>(std::move(config));
  if (std::filesystem::exists(log_path)) {
    std::ifstream in(log_path);
    if (!in) return Error{Errc::io_error, "cannot read log '" + log_path + "'"};
    reg->replaying_ = true;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto entry = core::parse_json(line);
      if (!entry) {
        reg->replaying_ = false;
        return Error{Errc::io_error, "corrupt log line " + std::to_string(line_no)};
      }
      auto applied = reg->apply_log_entry(entry.value());
      if (!applied) {
        reg->replaying_ = false;
        return Error{Errc::io_error, "log line " + std::to_string(line_no) + " failed: " +
                                         applied.error().to_string()};
      }
    }
    reg->replaying_ = false;
  }
  reg->log_.emplace(log_path, std::ios::app);
  if (!reg->log_->good()) return Error{Errc::io_error, "cannot append to log '" + log_path + "'"};
  return reg;
}

core::Result<void> Registry::apply_log_entry(const Json& entry) {
  const std::string op = entry.value("op", "");
  if (op == "publish") {
    auto desc = core::ModuleDescriptor::from_json(entry.at("desc"));
    if (!desc) return desc.error();
    return publish(std::move(desc).value(), entry.at("submitter"), entry.at("now"));
  }
  if (op == "review") {
    return review(entry.at("module_key"),
                  entry.at("verdict") == "accept" ? ReviewVerdict::accept
                                                  : ReviewVerdict::request_revision,
                  entry.at("now"));
  }
  if (op == "rate") {
    auto rating = core::Rating::from_json(entry.at("rating"));
    if (!rating) return rating.error();
    return rate(entry.at("module_key"), std::move(rating).value());
  }
  if (op == "purchase") {
    std::optional<std::string> fp;
    if (entry.contains("device_fingerprint")) fp = entry["device_fingerprint"].get<std::string>();
    auto ent = purchase(entry.at("app_id"), entry.at("module_key"), fp, entry.at("now"));
    if (!ent) return ent.error();
    return core::ok_result();
  }
  if (op == "transition") {
    auto target = core::lifecycle_from_name(entry.at("target").get<std::string>());
    if (!target) return Error{Errc::io_error, "bad transition target"};
    return transition(entry.at("module_key"), *target, entry.at("now"));
  }
  if (op == "sample") {
    auto metric = core::metric_from_name(entry.at("metric").get<std::string>());
    if (!metric) return Error{Errc::io_error, "bad sample metric"};
    return record_sample(entry.at("module_key"), *metric, entry.at("value"), entry.at("now"));
  }
  return Error{Errc::io_error, "unknown log op '" + op + "'"};
}

void Registry::append_log(const Json& entry) {
  if (replaying_ || !log_) return;
  (*log_) << core::canonical_dump(entry) << '\n';
  log_->flush();
}

core::Result<void> Registry::publish(core::ModuleDescriptor desc, const std::string& submitter,
                                     std::int64_t now_ms) {
  std::lock_guard lock(mu_);
  auto result = publish_locked(std::move(desc), submitter, now_ms);
  return result;
}

core::Result<void> Registry::publish_locked(core::ModuleDescriptor desc,
                                            const std::string& submitter, std::int64_t now_ms) {
  if (submitter.empty()) return Error{Errc::eponymity_violation, "anonymous submitter"};
  if (submitter != desc.contributor) {
    return Error{Errc::eponymity_violation,
                 "submitter '" + submitter + "' is not the contributor"};
  }
  auto validation = core::validate_descriptor(desc);
  if (!validation.ok()) {
    std::string joined;
    for (const auto& v : validation.violations) {
      if (!joined.empty()) joined += "; ";
      joined += v;
    }
    return Error{Errc::validation_failed, joined};
  }
  // module_ids must be unique registry-wide (own record excluded).
  for (const auto& [module_id, pset] : desc.parameterizations) {
    for (const auto& [other_key, rec] : modules_) {
      if (other_key == desc.module_key) continue;
      for (const auto* d : {rec.active ? &*rec.active : nullptr, rec.pending ? &*rec.pending : nullptr}) {
        if (d != nullptr && d->parameterizations.count(module_id) > 0) {
          return Error{Errc::validation_failed,
                       "module_id '" + module_id + "' already registered by '" + other_key + "'"};
        }
      }
    }
  }

  auto it = modules_.find(desc.module_key);
  const Json logged_desc = desc.to_json();
  if (it != modules_.end()) {
    ModuleRecord& rec = it->second;
    if (rec.disposed) return Error{Errc::disposed, "disposal is terminal"};
    if (rec.pending && rec.pending->lifecycle == Lifecycle::under_review) {
      return Error{Errc::illegal_transition, "revision already under review"};
    }
    const std::int64_t base = std::max(rec.active ? rec.active->version : 0,
                                       rec.pending ? rec.pending->version : 0);
    desc.version = base + 1;
  } else {
    desc.version = std::max<std::int64_t>(desc.version, 1);
  }
  desc.lifecycle = Lifecycle::under_review;
  desc.ratings.clear();
  desc.purchase_count = 0;
  if (desc.device_behavior) {
    // The registry seals the TO for the stored version.
    desc.device_behavior = core::TransferableObject::make(
        desc.module_key, desc.version, desc.device_behavior->behavior_id,
        desc.device_behavior->params);
  }
  modules_[desc.module_key].pending = desc;
  stats_[desc.module_key].last_maintainer_update_ms = now_ms;
  if (trace_) {
    trace_->record("registry.publish",
                   Json{{"module_key", desc.module_key}, {"version", desc.version}});
  }
  append_log(Json{{"op", "publish"}, {"desc", logged_desc}, {"submitter", submitter}, {"now", now_ms}});
  return core::ok_result();
}

core::Result<void> Registry::review(const std::string& module_key, ReviewVerdict verdict,
                                    std::int64_t now_ms) {
  std::lock_guard lock(mu_);
  auto it = modules_.find(module_key);
  if (it == modules_.end()) return Error{Errc::not_found, module_key};
  ModuleRecord& rec = it->second;
  if (rec.disposed) return Error{Errc::disposed, "disposal is terminal"};
  if (!rec.pending || rec.pending->lifecycle != Lifecycle::under_review) {
    return Error{Errc::illegal_transition,
                 "no revision under review for '" + module_key + "'"};
  }
  if (verdict == ReviewVerdict::accept) {
    core::ModuleDescriptor accepted = *rec.pending;
    accepted.lifecycle = Lifecycle::published;
    if (rec.active) {
      // Ratings and popularity attach to the module, not the revision.
      accepted.ratings = rec.active->ratings;
      accepted.purchase_count = rec.active->purchase_count;
    }
    rec.active = std::move(accepted);
    rec.pending.reset();
  } else {
    rec.pending->lifecycle = Lifecycle::revision_requested;
  }
  if (trace_) {
    trace_->record("registry.review",
                   Json{{"module_key", module_key},
                        {"verdict", verdict == ReviewVerdict::accept ? "accept" : "request_revision"}});
  }
  append_log(Json{{"op", "review"},
                  {"module_key", module_key},
                  {"verdict", verdict == ReviewVerdict::accept ? "accept" : "request_revision"},
                  {"now", now_ms}});
  return core::ok_result();
}

core::Result<void> Registry::rate(const std::string& module_key, core::Rating rating) {
  std::lock_guard lock(mu_);
  if (!rating.valid()) {
    return Error{Errc::invalid_rating, "stars must be in [1,5]"};
  }
  auto it = modules_.find(module_key);
  if (it == modules_.end()) return Error{Errc::not_found, module_key};
  ModuleRecord& rec = it->second;
  if (rec.disposed || !rec.active || rec.active->lifecycle != Lifecycle::published) {
    return Error{Errc::not_rateable, "module is not published"};
  }
  const Json logged = rating.to_json();
  rec.active->ratings.push_back(std::move(rating));
  append_log(Json{{"op", "rate"}, {"module_key", module_key}, {"rating", logged}});
  return core::ok_result();
}

double Registry::score_of(const core::ModuleDescriptor& active, const ObjectiveStats& stats) const {
  const double stars_term = active.mean_stars() / 5.0;
  const double attainment_term = stats.attainment_ratio();
  const double popularity_term =
      std::min(1.0, std::log10(1.0 + static_cast<double>(active.purchase_count)) / 3.0);
  return config_.weight_stars * stars_term + config_.weight_attainment * attainment_term +
         config_.weight_popularity * popularity_term;
}

std::vector<RankEntry> Registry::rank(const std::optional<std::string>& query) const {
  std::lock_guard lock(mu_);
  std::vector<RankEntry> out;
  for (const auto& [key, rec] : modules_) {
    if (rec.disposed || !rec.active || rec.active->lifecycle != Lifecycle::published) continue;
    if (query && key.find(*query) == std::string::npos &&
        rec.active->name.find(*query) == std::string::npos) {
      continue;
    }
    auto stats_it = stats_.find(key);
    const ObjectiveStats stats = stats_it == stats_.end() ? ObjectiveStats{} : stats_it->second;
    out.push_back(RankEntry{key, score_of(*rec.active, stats)});
  }
  std::sort(out.begin(), out.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.module_key < b.module_key;
  });
  return out;
}

std::vector<BrowseEntry> Registry::browse() const {
  std::lock_guard lock(mu_);
  std::vector<BrowseEntry> out;
  for (const auto& [key, rec] : modules_) {
    if (rec.disposed) continue;  // disposed modules are never listed
    const core::ModuleDescriptor* shown = rec.active ? &*rec.active : &*rec.pending;
    BrowseEntry entry;
    entry.module_key = key;
    entry.name = shown->name;
    entry.version = shown->version;
    entry.lifecycle = shown->lifecycle;
    entry.mean_stars = shown->mean_stars();
    entry.purchase_count = shown->purchase_count;
    out.push_back(std::move(entry));
  }
  return out;
}

core::Result<core::Entitlement> Registry::purchase(const std::string& app_id,
                                                   const std::string& module_key,
                                                   const std::optional<std::string>& device_fingerprint,
                                                   std::int64_t now_ms) {
  std::lock_guard lock(mu_);
  auto it = modules_.find(module_key);
  if (it == modules_.end()) return Error{Errc::not_found, module_key};
  ModuleRecord& rec = it->second;
  if (rec.disposed || !rec.active || rec.active->lifecycle != Lifecycle::published) {
    return Error{Errc::not_purchasable, "module is not published"};
  }
  auto ent = core::issue_entitlement(app_id, module_key, device_fingerprint, config_.secret, now_ms);
  if (!ent) return ent.error();
  rec.active->purchase_count += 1;
  entitlements_.push_back(ent.value());
  if (trace_) {
    trace_->record("registry.purchase", Json{{"module_key", module_key}, {"app_id", app_id}});
  }
  Json entry{{"op", "purchase"}, {"app_id", app_id}, {"module_key", module_key}, {"now", now_ms}};
  if (device_fingerprint) entry["device_fingerprint"] = *device_fingerprint;
  append_log(entry);
  return ent;
}

core::Result<ToReply> Registry::fetch_to(const core::Entitlement& ent,
                                         const std::string& module_key,
                                         std::optional<std::int64_t> cached_version) const {
  std::lock_guard lock(mu_);
  if (!core::verify_entitlement(ent, config_.secret) || ent.module_key != module_key) {
    return Error{Errc::unauthorized, "entitlement does not verify for '" + module_key + "'"};
  }
  auto it = modules_.find(module_key);
  if (it == modules_.end() || it->second.disposed || !it->second.active) {
    return Error{Errc::not_found, module_key};
  }
  const core::ModuleDescriptor& active = *it->second.active;
  ToReply reply;
  reply.version = active.version;
  for (const auto& [module_id, pset] : active.parameterizations) reply.module_ids.push_back(module_id);
  reply.has_network_behavior = active.network_behavior.has_value();
  if (cached_version && *cached_version == active.version) {
    reply.status = ToReply::Status::up_to_date;
    return reply;
  }
  if (!active.device_behavior) {
    reply.status = ToReply::Status::default_device;
    return reply;
  }
  reply.status = ToReply::Status::new_to;
  reply.to = active.device_behavior;
  return reply;
}

core::Result<void> Registry::transition(const std::string& module_key, Lifecycle target,
                                        std::int64_t now_ms) {
  std::lock_guard lock(mu_);
  auto it = modules_.find(module_key);
  if (it == modules_.end()) return Error{Errc::not_found, module_key};
  ModuleRecord& rec = it->second;
  if (rec.disposed) return Error{Errc::disposed, "disposal is terminal"};
  if (target == Lifecycle::deprecated) {
    if (!rec.active || rec.active->lifecycle != Lifecycle::published) {
      return Error{Errc::illegal_transition, "only published modules can be deprecated"};
    }
    rec.active->lifecycle = Lifecycle::deprecated;
  } else if (target == Lifecycle::disposed) {
    if (!rec.active || rec.active->lifecycle != Lifecycle::deprecated) {
      return Error{Errc::disposal_refused, "not deprecated"};
    }
    auto stats_it = stats_.find(module_key);
    const ObjectiveStats stats = stats_it == stats_.end() ? ObjectiveStats{} : stats_it->second;
    if (stats.samples < config_.disposal_min_samples) {
      return Error{Errc::disposal_refused, "insufficient samples"};
    }
    if (stats.attainment_ratio() >= config_.disposal_max_attainment) {
      return Error{Errc::disposal_refused, "efficient"};
    }
    if (now_ms - stats.last_maintainer_update_ms <= config_.maintenance_grace_ms) {
      return Error{Errc::disposal_refused, "maintained"};
    }
    rec.active->lifecycle = Lifecycle::disposed;
    rec.pending.reset();
    rec.disposed = true;
  } else {
    return Error{Errc::illegal_transition,
                 std::string("unsupported transition target '") +
                     std::string(core::lifecycle_name(target)) + "'"};
  }
  if (trace_) {
    trace_->record("registry.transition",
                   Json{{"module_key", module_key}, {"target", core::lifecycle_name(target)}});
  }
  append_log(Json{{"op", "transition"},
                  {"module_key", module_key},
                  {"target", core::lifecycle_name(target)},
                  {"now", now_ms}});
  return core::ok_result();
}

core::Result<std::string> Registry::compose(const std::vector<std::string>& parts,
                                            const ComposeSpec& spec, const std::string& submitter,
                                            std::int64_t now_ms) {
  std::lock_guard lock(mu_);
  if (parts.empty()) return Error{Errc::composition_refused, "no parts"};
  for (const auto& part : parts) {
    auto it = modules_.find(part);
    if (it == modules_.end() || it->second.disposed || !it->second.active ||
        it->second.active->lifecycle != Lifecycle::published) {
      return Error{Errc::composition_refused, "part '" + part + "' is not published"};
    }
  }
  core::ModuleDescriptor desc;
  desc.module_key = spec.module_key;
  desc.name = spec.name;
  desc.version = 1;
  desc.contributor = spec.contributor;
  desc.objective = spec.objective;
  desc.network_behavior = core::SsoBehaviorRef{"composite"};
  desc.parameterizations = spec.parameterizations;
  if (desc.parameterizations.empty()) desc.parameterizations["default"] = {};
  desc.composed_of = parts;
  auto published = publish_locked(std::move(desc), submitter, now_ms);
  if (!published) return published.error();
  return spec.module_key;
}

core::Result<void> Registry::record_sample(const std::string& module_key, core::Metric metric,
                                           double value, std::int64_t now_ms) {
  std::lock_guard lock(mu_);
  auto it = modules_.find(module_key);
  if (it == modules_.end() || !it->second.active) return Error{Errc::not_found, module_key};
  const core::ModuleDescriptor& active = *it->second.active;
  if (metric != active.objective.metric) {
    return Error{Errc::invalid_argument, "sample metric does not match the module objective"};
  }
  ObjectiveStats& stats = stats_[module_key];
  stats.samples += 1;
  if (active.objective.satisfied_by(value)) stats.attained += 1;
  append_log(Json{{"op", "sample"},
                  {"module_key", module_key},
                  {"metric", core::metric_name(metric)},
                  {"value", value},
                  {"now", now_ms}});
  return core::ok_result();
}

bool Registry::verify(const core::Entitlement& ent) const {
  return core::verify_entitlement(ent, config_.secret);
}

core::Result<ModuleInfo> Registry::module_info(const std::string& module_key) const {
  std::lock_guard lock(mu_);
  auto it = modules_.find(module_key);
  if (it == modules_.end() || it->second.disposed || !it->second.active) {
    return Error{Errc::not_found, module_key};
  }
  const core::ModuleDescriptor& active = *it->second.active;
  ModuleInfo info;
  info.module_key = module_key;
  info.version = active.version;
  info.lifecycle = active.lifecycle;
  info.objective = active.objective;
  if (active.network_behavior) info.network_behavior_id = active.network_behavior->behavior_id;
  info.parameterizations = active.parameterizations;
  info.composed_of = active.composed_of;
  return info;
}

core::Result<std::string> Registry::resolve_module_id(const std::string& module_id) const {
  std::lock_guard lock(mu_);
  for (const auto& [key, rec] : modules_) {
    if (rec.disposed || !rec.active) continue;
    if (rec.active->parameterizations.count(module_id) > 0) return key;
  }
  return Error{Errc::unknown_parameterization, module_id};
}

std::optional<Lifecycle> Registry::lifecycle_of(const std::string& module_key) const {
  std::lock_guard lock(mu_);
  auto it = modules_.find(module_key);
  if (it == modules_.end()) return std::nullopt;
  return it->second.lifecycle();
}

std::optional<ObjectiveStats> Registry::stats_of(const std::string& module_key) const {
  std::lock_guard lock(mu_);
  auto it = stats_.find(module_key);
  if (it == stats_.end()) return std::nullopt;
  return it->second;
}

std::optional<core::ModuleDescriptor> Registry::served_descriptor(
    const std::string& module_key) const {
  std::lock_guard lock(mu_);
  auto it = modules_.find(module_key);
  if (it == modules_.end() || !it->second.active) return std::nullopt;
  return it->second.active;
}

std::optional<core::ModuleDescriptor> Registry::pending_descriptor(
    const std::string& module_key) const {
  std::lock_guard lock(mu_);
  auto it = modules_.find(module_key);
  if (it == modules_.end() || !it->second.pending) return std::nullopt;
  return it->second.pending;
}

core::Json Registry::snapshot() const {
  std::lock_guard lock(mu_);
  Json modules = Json::object();
  for (const auto& [key, rec] : modules_) modules[key] = rec.to_json();
  Json stats = Json::object();
  for (const auto& [key, s] : stats_) stats[key] = s.to_json();
  Json ents = Json::array();
  for (const auto& e : entitlements_) ents.push_back(e.to_json());
  return Json{{"modules", modules}, {"stats", stats}, {"entitlements", ents}};
}

core::Result<std::unique_ptr<Registry>> Registry::from_snapshot(RegistryConfig config,
                                                                const Json& snapshot) {
  auto reg = std::make_unique<Registry>(std::move(config));
  if (!snapshot.is_object()) return Error{Errc::protocol_error, "snapshot must be an object"};
  if (snapshot.contains("modules")) {
    for (const auto& [key, rj] : snapshot["modules"].items()) {
      auto rec = ModuleRecord::from_json(rj);
      if (!rec) return rec.error();
      reg->modules_[key] = std::move(rec).value();
    }
  }
  if (snapshot.contains("stats")) {
    for (const auto& [key, sj] : snapshot["stats"].items()) {
      reg->stats_[key] = ObjectiveStats::from_json(sj);
    }
  }
  if (snapshot.contains("entitlements")) {
    for (const auto& ej : snapshot["entitlements"]) {
      auto ent = core::Entitlement::from_json(ej);
      if (!ent) return ent.error();
      reg->entitlements_.push_back(std::move(ent).value());
    }
  }
  return reg;
}

}  // namespace socketstore::registry
