#include "istar/views.hpp"

#include <algorithm>

namespace istar {

namespace {

bool is_boundary_element(const IntentionalElement& elem) {
    return std::holds_alternative<ActorId>(elem.owner);
}

bool owned_by_open(const IntentionalElement& elem,
                   const std::set<ActorId>& open) {
    const ActorId* owner = std::get_if<ActorId>(&elem.owner);
    return owner && open.count(*owner) > 0;
}

// Drops sourceMap entries whose id no longer exists in the projection.
void prune_source_map(Model& model) {
    std::set<std::uint32_t> alive;
    for (const Actor& a : model.actors) alive.insert(a.id.value);
    for (const IntentionalElement& e : model.elements) alive.insert(e.id.value);
    for (const ActorLink& l : model.actorLinks) alive.insert(l.id.value);
    for (const Refinement& r : model.refinements) alive.insert(r.id.value);
    for (const ElementLink& l : model.elementLinks) alive.insert(l.id.value);
    for (const Dependency& d : model.dependencies) alive.insert(d.id.value);
    std::erase_if(model.sourceMap,
                  [&](const auto& entry) { return !alive.count(entry.first); });
}

// Keeps an elmt anchor only if the element survived the projection.
void anchor_to_surviving(Model& model) {
    auto exists = [&](ElementId id) { return model.find(id) != nullptr; };
    for (Dependency& dep : model.dependencies) {
        if (dep.dependerElmt && !exists(*dep.dependerElmt))
            dep.dependerElmt.reset();
        if (dep.dependeeElmt && !exists(*dep.dependeeElmt))
            dep.dependeeElmt.reset();
    }
}

Model project_sd(const Model& source) {
    Model out = source;
    std::erase_if(out.elements, is_boundary_element);
    out.refinements.clear();
    out.elementLinks.clear();
    for (Dependency& dep : out.dependencies) {
        dep.dependerElmt.reset();
        dep.dependeeElmt.reset();
    }
    return out;
}

Model project_hybrid(const Model& source, const std::set<ActorId>& open) {
    Model out = source;
    out.actorLinks.clear();
    std::erase_if(out.elements, [&](const IntentionalElement& elem) {
        return is_boundary_element(elem) && !owned_by_open(elem, open);
    });
    auto in_open_boundary = [&](ElementId id) {
        const IntentionalElement* elem = out.find(id);
        return elem != nullptr && owned_by_open(*elem, open);
    };
    std::erase_if(out.refinements, [&](const Refinement& r) {
        return !in_open_boundary(r.parent);
    });
    std::erase_if(out.elementLinks, [&](const ElementLink& link) {
        if (const Contribution* c = std::get_if<Contribution>(&link.variant))
            return !in_open_boundary(c->source);
        if (const NeededBy* n = std::get_if<NeededBy>(&link.variant))
            return !in_open_boundary(n->task);
        return !in_open_boundary(std::get<Qualification>(link.variant).quality);
    });
    anchor_to_surviving(out);
    return out;
}

Model project_actor_view(const Model& source) {
    Model out = source;
    out.elements.clear();
    out.refinements.clear();
    out.elementLinks.clear();
    out.dependencies.clear();
    return out;
}

Model project_functional(const Model& source) {
    Model out = source;
    // quality-dependum dependencies go away entirely, a dependency without
    // its dependum has no meaning
    std::set<std::uint32_t> droppedDependums;
    std::erase_if(out.dependencies, [&](const Dependency& dep) {
        const IntentionalElement* dependum = source.find(dep.dependum);
        if (dependum && dependum->kind == ElementKind::Quality) {
            droppedDependums.insert(dep.dependum.value);
            return true;
        }
        return false;
    });
    std::erase_if(out.elements, [&](const IntentionalElement& elem) {
        return elem.kind == ElementKind::Quality ||
               droppedDependums.count(elem.id.value) > 0;
    });
    std::erase_if(out.elementLinks, [&](const ElementLink& link) {
        return !std::holds_alternative<NeededBy>(link.variant);
    });
    anchor_to_surviving(out);
    return out;
}

}  // namespace

ProjectOutcome project(const Model& model, const ViewKind& kind) {
    ProjectOutcome outcome;
    std::vector<Diagnostic> diags = validate(model);
    bool hasErrors = std::any_of(diags.begin(), diags.end(), [](const auto& d) {
        return d.severity == Severity::Error;
    });
    if (hasErrors) {
        outcome.error = ProjectError{ProjectErrorCode::InvalidModel,
                                     "model has validation errors",
                                     std::move(diags)};
        return outcome;
    }
    if (kind.tag == ViewKind::Tag::Hybrid) {
        for (ActorId open : kind.openActors)
            if (!model.find(open)) {
                outcome.error = ProjectError{
                    ProjectErrorCode::UnknownOpenActor,
                    "hybrid view refers to an actor that is not in the model",
                    {}};
                return outcome;
            }
    }

    ViewModel view;
    view.kind = kind;
    switch (kind.tag) {
        case ViewKind::Tag::SR: view.model = model; break;
        case ViewKind::Tag::SD: view.model = project_sd(model); break;
        case ViewKind::Tag::Hybrid:
            view.model = project_hybrid(model, kind.openActors);
            break;
        case ViewKind::Tag::ActorView:
            view.model = project_actor_view(model);
            break;
        case ViewKind::Tag::FunctionalView:
            view.model = project_functional(model);
            break;
    }
    prune_source_map(view.model);
    outcome.view = std::move(view);
    return outcome;
}

}  // namespace istar
