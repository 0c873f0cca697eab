#include "istar/export.hpp"

#include <map>
#include <sstream>

#include "json.hpp"

namespace istar {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Interchange id scheme: per-type counters in declaration order
// ---------------------------------------------------------------------------

namespace {

struct WireIds {
    std::map<std::uint32_t, std::string> byNumeric;

    explicit WireIds(const Model& model) {
        label(model.actors, "a");
        label(model.elements, "e");
        label(model.actorLinks, "al");
        label(model.refinements, "r");
        label(model.elementLinks, "el");
        label(model.dependencies, "d");
    }

    template <class Entities>
    void label(const Entities& entities, const char* prefix) {
        int n = 0;
        for (const auto& entity : entities)
            byNumeric[entity.id.value] = prefix + std::to_string(++n);
    }

    template <class IdT>
    std::string operator()(IdT id) const {
        auto it = byNumeric.find(id.value);
        return it != byNumeric.end() ? it->second : "?";
    }
};

const char* wire_actor_kind(ActorKind kind) {
    switch (kind) {
        case ActorKind::GenericActor: return "actor";
        case ActorKind::Agent: return "agent";
        case ActorKind::Role: return "role";
    }
    return "?";
}

const char* wire_link_kind(ActorLinkKind kind) {
    return kind == ActorLinkKind::IsA ? "is-a" : "participates-in";
}

}  // namespace

std::string to_interchange(const Model& model) {
    WireIds wire(model);
    json doc;  // nlohmann::json keeps keys sorted
    doc["schemaVersion"] = kInterchangeSchemaVersion;

    doc["actors"] = json::array();
    for (const Actor& actor : model.actors)
        doc["actors"].push_back({{"id", wire(actor.id)},
                                 {"name", actor.name},
                                 {"kind", wire_actor_kind(actor.kind)}});

    doc["elements"] = json::array();
    for (const IntentionalElement& elem : model.elements) {
        json record = {{"id", wire(elem.id)},
                       {"name", elem.name},
                       {"kind", to_string(elem.kind)}};
        if (const ActorId* owner = std::get_if<ActorId>(&elem.owner))
            record["owner"] = wire(*owner);
        else
            record["owner"] = nullptr;  // dependum, owned by its dependency
        doc["elements"].push_back(std::move(record));
    }

    doc["actorLinks"] = json::array();
    for (const ActorLink& link : model.actorLinks)
        doc["actorLinks"].push_back({{"id", wire(link.id)},
                                     {"kind", wire_link_kind(link.kind)},
                                     {"source", wire(link.source)},
                                     {"target", wire(link.target)}});

    doc["refinements"] = json::array();
    for (const Refinement& refinement : model.refinements) {
        json children = json::array();
        for (ElementId child : refinement.children)
            children.push_back(wire(child));
        doc["refinements"].push_back(
            {{"id", wire(refinement.id)},
             {"parent", wire(refinement.parent)},
             {"children", std::move(children)},
             {"operator",
              refinement.op == RefinementOperator::And ? "and" : "or"}});
    }

    doc["elementLinks"] = json::array();
    for (const ElementLink& link : model.elementLinks) {
        json record = {{"id", wire(link.id)}};
        if (const Contribution* c = std::get_if<Contribution>(&link.variant)) {
            record["kind"] = "contributesTo";
            record["source"] = wire(c->source);
            record["target"] = wire(c->target);
            record["level"] = to_string(c->level);
        } else if (const NeededBy* n = std::get_if<NeededBy>(&link.variant)) {
            record["kind"] = "neededBy";
            record["resource"] = wire(n->resource);
            record["task"] = wire(n->task);
        } else {
            const Qualification& q = std::get<Qualification>(link.variant);
            record["kind"] = "qualifies";
            record["quality"] = wire(q.quality);
            record["subject"] = wire(q.subject);
        }
        doc["elementLinks"].push_back(std::move(record));
    }

    doc["dependencies"] = json::array();
    for (const Dependency& dep : model.dependencies) {
        json record = {{"id", wire(dep.id)},
                       {"depender", wire(dep.depender)},
                       {"dependum", wire(dep.dependum)},
                       {"dependee", wire(dep.dependee)}};
        record["dependerElmt"] =
            dep.dependerElmt ? json(wire(*dep.dependerElmt)) : json(nullptr);
        record["dependeeElmt"] =
            dep.dependeeElmt ? json(wire(*dep.dependeeElmt)) : json(nullptr);
        doc["dependencies"].push_back(std::move(record));
    }

    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// from_interchange
// ---------------------------------------------------------------------------

namespace {

struct Importer {
    Model model;
    std::vector<Diagnostic> diags;

    std::map<std::string, ActorId> actors;
    std::map<std::string, ElementId> elements;  // boundary elements
    struct DependumRecord {
        std::string name;
        ElementKind kind = ElementKind::Goal;
        std::optional<std::string> usedBy;  // wire id of consuming dependency
    };
    std::map<std::string, DependumRecord> dependums;

    void fail(std::string code, const std::string& path, std::string message) {
        Diagnostic d;
        d.code = std::move(code);
        d.severity = Severity::Error;
        d.message = path + ": " + std::move(message);
        diags.push_back(std::move(d));
    }

    const json* field(const json& record, const char* key,
                      const std::string& path) {
        auto it = record.find(key);
        if (it == record.end()) {
            fail("I001", path, std::string("missing field '") + key + "'");
            return nullptr;
        }
        return &*it;
    }

    std::optional<std::string> string_field(const json& record, const char* key,
                                            const std::string& path) {
        const json* value = field(record, key, path);
        if (!value) return std::nullopt;
        if (!value->is_string()) {
            fail("I001", path, std::string("field '") + key +
                                   "' must be a string");
            return std::nullopt;
        }
        return value->get<std::string>();
    }

    std::optional<ElementKind> element_kind(const std::string& text,
                                            const std::string& path) {
        if (text == "goal") return ElementKind::Goal;
        if (text == "quality") return ElementKind::Quality;
        if (text == "task") return ElementKind::Task;
        if (text == "resource") return ElementKind::Resource;
        fail("I001", path, "unknown element kind '" + text + "'");
        return std::nullopt;
    }

    void surface(const ModelError& error, const std::string& path) {
        fail(diagnostic_code_for(error.code), path, error.message);
    }

    void import_actors(const json& doc) {
        std::size_t i = 0;
        for (const json& record : doc) {
            std::string path = "/actors/" + std::to_string(i++);
            auto id = string_field(record, "id", path);
            auto name = string_field(record, "name", path);
            auto kindText = string_field(record, "kind", path);
            if (!id || !name || !kindText) continue;
            ActorKind kind;
            if (*kindText == "actor") kind = ActorKind::GenericActor;
            else if (*kindText == "agent") kind = ActorKind::Agent;
            else if (*kindText == "role") kind = ActorKind::Role;
            else {
                fail("I001", path, "unknown actor kind '" + *kindText + "'");
                continue;
            }
            if (actors.count(*id)) {
                fail("I004", path, "duplicate actor id '" + *id + "'");
                continue;
            }
            auto result = add_actor(model, *name, kind);
            if (!result) {
                surface(result.error(), path);
                continue;
            }
            actors[*id] = *result;
        }
    }

    void import_elements(const json& doc) {
        std::size_t i = 0;
        for (const json& record : doc) {
            std::string path = "/elements/" + std::to_string(i++);
            auto id = string_field(record, "id", path);
            auto name = string_field(record, "name", path);
            auto kindText = string_field(record, "kind", path);
            const json* owner = field(record, "owner", path);
            if (!id || !name || !kindText || !owner) continue;
            auto kind = element_kind(*kindText, path);
            if (!kind) continue;
            if (elements.count(*id) || dependums.count(*id)) {
                fail("I004", path, "duplicate element id '" + *id + "'");
                continue;
            }
            if (owner->is_null()) {
                dependums[*id] = {*name, *kind, std::nullopt};
                continue;
            }
            if (!owner->is_string()) {
                fail("I001", path, "field 'owner' must be a string or null");
                continue;
            }
            auto actorIt = actors.find(owner->get<std::string>());
            if (actorIt == actors.end()) {
                fail("I003", path,
                     "owner '" + owner->get<std::string>() + "' is not a "
                     "declared actor");
                continue;
            }
            auto result = add_element(model, actorIt->second, *name, *kind);
            if (!result) {
                surface(result.error(), path);
                continue;
            }
            elements[*id] = *result;
        }
    }

    std::optional<ActorId> actor_ref(const json& record, const char* key,
                                     const std::string& path) {
        auto text = string_field(record, key, path);
        if (!text) return std::nullopt;
        auto it = actors.find(*text);
        if (it == actors.end()) {
            fail("I003", path, std::string("'") + key + "' refers to unknown "
                                   "actor '" + *text + "'");
            return std::nullopt;
        }
        return it->second;
    }

    std::optional<ElementId> element_ref(const std::string& text,
                                         const std::string& path,
                                         const char* key) {
        auto it = elements.find(text);
        if (it == elements.end()) {
            fail("I003", path, std::string("'") + key + "' refers to unknown "
                                   "element '" + text + "'");
            return std::nullopt;
        }
        return it->second;
    }

    void import_actor_links(const json& doc) {
        std::size_t i = 0;
        for (const json& record : doc) {
            std::string path = "/actorLinks/" + std::to_string(i++);
            auto kindText = string_field(record, "kind", path);
            auto source = actor_ref(record, "source", path);
            auto target = actor_ref(record, "target", path);
            if (!kindText || !source || !target) continue;
            ActorLinkKind kind;
            if (*kindText == "is-a") kind = ActorLinkKind::IsA;
            else if (*kindText == "participates-in")
                kind = ActorLinkKind::ParticipatesIn;
            else {
                fail("I001", path,
                     "unknown actor link kind '" + *kindText + "'");
                continue;
            }
            auto result = add_actor_link(model, *source, *target, kind);
            if (!result) surface(result.error(), path);
        }
    }

    void import_refinements(const json& doc) {
        std::size_t i = 0;
        for (const json& record : doc) {
            std::string path = "/refinements/" + std::to_string(i++);
            auto parentText = string_field(record, "parent", path);
            auto opText = string_field(record, "operator", path);
            const json* childrenField = field(record, "children", path);
            if (!parentText || !opText || !childrenField) continue;
            if (!childrenField->is_array()) {
                fail("I001", path, "field 'children' must be an array");
                continue;
            }
            auto parent = element_ref(*parentText, path, "parent");
            if (!parent) continue;
            RefinementOperator op;
            if (*opText == "and") op = RefinementOperator::And;
            else if (*opText == "or") op = RefinementOperator::Or;
            else {
                fail("I001", path, "unknown operator '" + *opText + "'");
                continue;
            }
            std::vector<ElementId> children;
            bool ok = true;
            for (const json& child : *childrenField) {
                if (!child.is_string()) {
                    fail("I001", path, "children entries must be strings");
                    ok = false;
                    break;
                }
                auto id = element_ref(child.get<std::string>(), path, "child");
                if (!id) {
                    ok = false;
                    break;
                }
                children.push_back(*id);
            }
            if (!ok) continue;
            auto result = add_refinement(model, *parent, children, op);
            if (!result) surface(result.error(), path);
        }
    }

    void import_element_links(const json& doc) {
        std::size_t i = 0;
        for (const json& record : doc) {
            std::string path = "/elementLinks/" + std::to_string(i++);
            auto kind = string_field(record, "kind", path);
            if (!kind) continue;
            if (*kind == "contributesTo") {
                auto sourceText = string_field(record, "source", path);
                auto targetText = string_field(record, "target", path);
                auto levelText = string_field(record, "level", path);
                if (!sourceText || !targetText || !levelText) continue;
                auto source = element_ref(*sourceText, path, "source");
                auto target = element_ref(*targetText, path, "target");
                if (!source || !target) continue;
                ContributionLevel level;
                if (*levelText == "make") level = ContributionLevel::Make;
                else if (*levelText == "help") level = ContributionLevel::Help;
                else if (*levelText == "hurt") level = ContributionLevel::Hurt;
                else if (*levelText == "break")
                    level = ContributionLevel::Break;
                else {
                    fail("I001", path,
                         "unknown contribution level '" + *levelText + "'");
                    continue;
                }
                auto result = add_element_link(
                    model, Contribution{*source, *target, level});
                if (!result) surface(result.error(), path);
            } else if (*kind == "neededBy") {
                auto resourceText = string_field(record, "resource", path);
                auto taskText = string_field(record, "task", path);
                if (!resourceText || !taskText) continue;
                auto resource = element_ref(*resourceText, path, "resource");
                auto task = element_ref(*taskText, path, "task");
                if (!resource || !task) continue;
                auto result =
                    add_element_link(model, NeededBy{*resource, *task});
                if (!result) surface(result.error(), path);
            } else if (*kind == "qualifies") {
                auto qualityText = string_field(record, "quality", path);
                auto subjectText = string_field(record, "subject", path);
                if (!qualityText || !subjectText) continue;
                auto quality = element_ref(*qualityText, path, "quality");
                auto subject = element_ref(*subjectText, path, "subject");
                if (!quality || !subject) continue;
                auto result =
                    add_element_link(model, Qualification{*quality, *subject});
                if (!result) surface(result.error(), path);
            } else {
                fail("I001", path, "unknown element link kind '" + *kind + "'");
            }
        }
    }

    void import_dependencies(const json& doc) {
        std::size_t i = 0;
        for (const json& record : doc) {
            std::string path = "/dependencies/" + std::to_string(i++);
            auto wireId = string_field(record, "id", path);
            auto depender = actor_ref(record, "depender", path);
            auto dependee = actor_ref(record, "dependee", path);
            auto dependumText = string_field(record, "dependum", path);
            const json* dependerElmtField =
                field(record, "dependerElmt", path);
            const json* dependeeElmtField =
                field(record, "dependeeElmt", path);
            if (!wireId || !depender || !dependee || !dependumText ||
                !dependerElmtField || !dependeeElmtField)
                continue;

            auto optional_elmt =
                [&](const json& value,
                    const char* key) -> std::pair<bool, std::optional<ElementId>> {
                if (value.is_null()) return {true, std::nullopt};
                if (!value.is_string()) {
                    fail("I001", path, std::string("field '") + key +
                                           "' must be a string or null");
                    return {false, std::nullopt};
                }
                auto id = element_ref(value.get<std::string>(), path, key);
                if (!id) return {false, std::nullopt};
                return {true, id};
            };
            auto [okFrom, dependerElmt] =
                optional_elmt(*dependerElmtField, "dependerElmt");
            auto [okTo, dependeeElmt] =
                optional_elmt(*dependeeElmtField, "dependeeElmt");
            if (!okFrom || !okTo) continue;

            auto dependumIt = dependums.find(*dependumText);
            if (dependumIt == dependums.end()) {
                if (elements.count(*dependumText))
                    fail("E016", path,
                         "dependum '" + *dependumText +
                             "' is a boundary element, not a dedicated "
                             "dependum");
                else
                    fail("I003", path, "dependum '" + *dependumText +
                                           "' is not declared");
                continue;
            }
            if (dependumIt->second.usedBy) {
                fail("E016", path,
                     "dependum '" + *dependumText +
                         "' is already owned by dependency '" +
                         *dependumIt->second.usedBy + "'");
                continue;
            }
            auto result = add_dependency(model, *depender, dependerElmt,
                                         dependumIt->second.name,
                                         dependumIt->second.kind, *dependee,
                                         dependeeElmt);
            if (!result) {
                surface(result.error(), path);
                continue;
            }
            dependumIt->second.usedBy = *wireId;
        }
        for (const auto& [id, record] : dependums)
            if (!record.usedBy)
                fail("I003", "/elements",
                     "dependum '" + id + "' is not referenced by any "
                     "dependency");
    }
};

}  // namespace

std::variant<Model, std::vector<Diagnostic>> from_interchange(
    const std::string& doc) {
    Importer importer;
    json parsed = json::parse(doc, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        importer.fail("I001", "/", "document is not a JSON object");
        return importer.diags;
    }
    auto version = parsed.find("schemaVersion");
    if (version == parsed.end() || !version->is_string()) {
        importer.fail("I001", "/schemaVersion", "missing schema version");
        return importer.diags;
    }
    if (version->get<std::string>() != kInterchangeSchemaVersion) {
        importer.fail("I002", "/schemaVersion",
                      "unsupported schema version '" +
                          version->get<std::string>() + "', expected '" +
                          kInterchangeSchemaVersion + "'");
        return importer.diags;
    }

    auto section = [&](const char* key) -> const json& {
        static const json empty = json::array();
        auto it = parsed.find(key);
        if (it == parsed.end()) return empty;
        if (!it->is_array()) {
            importer.fail("I001", std::string("/") + key,
                          "section must be an array");
            return empty;
        }
        return *it;
    };

    importer.import_actors(section("actors"));
    importer.import_elements(section("elements"));
    importer.import_actor_links(section("actorLinks"));
    importer.import_refinements(section("refinements"));
    importer.import_element_links(section("elementLinks"));
    importer.import_dependencies(section("dependencies"));

    if (!importer.diags.empty()) {
        sort_diagnostics(importer.diags);
        return importer.diags;
    }
    return importer.model;
}

// ---------------------------------------------------------------------------
// Graphviz dot
// ---------------------------------------------------------------------------

namespace {

std::string dot_quote(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    out += '"';
    return out;
}

const char* dot_shape(ElementKind kind) {
    switch (kind) {
        case ElementKind::Goal: return "ellipse";
        case ElementKind::Quality: return "octagon";
        case ElementKind::Task: return "hexagon";
        case ElementKind::Resource: return "box";
    }
    return "box";
}

}  // namespace

std::string to_graph_text(const ViewModel& view) {
    const Model& m = view.model;
    WireIds wire(m);
    std::ostringstream out;
    out << "digraph istar {\n  rankdir=LR;\n";

    bool openAll = view.kind.tag == ViewKind::Tag::SR ||
                   view.kind.tag == ViewKind::Tag::FunctionalView;
    auto is_open = [&](ActorId id) {
        if (openAll) return true;
        if (view.kind.tag == ViewKind::Tag::Hybrid)
            return view.kind.openActors.count(id) > 0;
        return false;
    };

    auto emit_actor_node = [&](const Actor& actor, const char* indent) {
        out << indent << dot_quote(wire(actor.id)) << " [label="
            << dot_quote(actor.name) << ", kind=\""
            << wire_actor_kind(actor.kind) << "\", shape=circle];\n";
    };

    for (const Actor& actor : m.actors) {
        if (is_open(actor.id)) {
            out << "  subgraph " << "cluster_" << wire(actor.id) << " {\n"
                << "    label=" << dot_quote(actor.name) << ";\n";
            emit_actor_node(actor, "    ");
            for (const IntentionalElement& elem : m.elements) {
                const ActorId* owner = std::get_if<ActorId>(&elem.owner);
                if (!owner || *owner != actor.id) continue;
                out << "    " << dot_quote(wire(elem.id)) << " [label="
                    << dot_quote(elem.name) << ", kind=\""
                    << to_string(elem.kind) << "\", shape="
                    << dot_shape(elem.kind) << "];\n";
            }
            out << "  }\n";
        } else {
            emit_actor_node(actor, "  ");
        }
    }

    // dependums sit outside every boundary
    for (const IntentionalElement& elem : m.elements) {
        if (std::holds_alternative<ActorId>(elem.owner)) continue;
        out << "  " << dot_quote(wire(elem.id)) << " [label="
            << dot_quote(elem.name) << ", kind=\"" << to_string(elem.kind)
            << "\", dependum=\"true\", shape=" << dot_shape(elem.kind)
            << "];\n";
    }

    for (const ActorLink& link : m.actorLinks)
        out << "  " << dot_quote(wire(link.source)) << " -> "
            << dot_quote(wire(link.target)) << " [styletag=\""
            << (link.kind == ActorLinkKind::IsA ? "isa" : "participates")
            << "\", label=\""
            << (link.kind == ActorLinkKind::IsA ? "is-a" : "participates-in")
            << "\"];\n";

    for (const Refinement& refinement : m.refinements) {
        const char* tag = refinement.op == RefinementOperator::And
                              ? "and-refine"
                              : "or-refine";
        const char* head =
            refinement.op == RefinementOperator::And ? "tee" : "normal";
        for (ElementId child : refinement.children)
            out << "  " << dot_quote(wire(child)) << " -> "
                << dot_quote(wire(refinement.parent)) << " [styletag=\"" << tag
                << "\", arrowhead=" << head << "];\n";
    }

    for (const ElementLink& link : m.elementLinks) {
        if (const Contribution* c = std::get_if<Contribution>(&link.variant)) {
            out << "  " << dot_quote(wire(c->source)) << " -> "
                << dot_quote(wire(c->target)) << " [styletag=\"contribution-"
                << to_string(c->level) << "\", label=\"" << to_string(c->level)
                << "\"];\n";
        } else if (const NeededBy* n = std::get_if<NeededBy>(&link.variant)) {
            out << "  " << dot_quote(wire(n->resource)) << " -> "
                << dot_quote(wire(n->task))
                << " [styletag=\"neededby\", arrowhead=odot];\n";
        } else {
            const Qualification& q = std::get<Qualification>(link.variant);
            out << "  " << dot_quote(wire(q.quality)) << " -> "
                << dot_quote(wire(q.subject))
                << " [styletag=\"qualification\", style=dotted];\n";
        }
    }

    for (const Dependency& dep : m.dependencies) {
        std::string from = dep.dependerElmt ? wire(*dep.dependerElmt)
                                            : wire(dep.depender);
        std::string to =
            dep.dependeeElmt ? wire(*dep.dependeeElmt) : wire(dep.dependee);
        out << "  " << dot_quote(from) << " -> " << dot_quote(wire(dep.dependum))
            << " [styletag=\"dependency-out\", label=\"D\"];\n";
        out << "  " << dot_quote(wire(dep.dependum)) << " -> " << dot_quote(to)
            << " [styletag=\"dependency-in\", label=\"D\"];\n";
    }

    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Machine diagnostics
// ---------------------------------------------------------------------------

std::string diagnostics_to_machine(const std::vector<Diagnostic>& diags) {
    std::vector<Diagnostic> sorted = diags;
    sort_diagnostics(sorted);
    auto location = [](const DiagnosticLocation& loc) {
        json record;
        record["id"] = loc.id;
        if (loc.span) {
            record["file"] = loc.span->file;
            record["startLine"] = loc.span->startLine;
            record["startCol"] = loc.span->startCol;
            record["endLine"] = loc.span->endLine;
            record["endCol"] = loc.span->endCol;
        } else {
            record["file"] = nullptr;
            record["startLine"] = nullptr;
            record["startCol"] = nullptr;
            record["endLine"] = nullptr;
            record["endCol"] = nullptr;
        }
        return record;
    };
    std::string out;
    for (const Diagnostic& d : sorted) {
        json record;
        record["code"] = d.code;
        record["severity"] = to_string(d.severity);
        record["message"] = d.message;
        json primary = location(d.primary);
        for (auto& [key, value] : primary.items()) record[key] = value;
        record["related"] = json::array();
        for (const DiagnosticLocation& rel : d.related)
            record["related"].push_back(location(rel));
        out += record.dump();
        out += '\n';
    }
    return out;
}

}  // namespace istar
