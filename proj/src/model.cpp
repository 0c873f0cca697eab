#include "istar/model.hpp"

#include <algorithm>
#include <cctype>

#include "istar/validator.hpp"

namespace istar {

const char* to_string(ActorKind kind) {
    switch (kind) {
        case ActorKind::GenericActor: return "actor";
        case ActorKind::Agent: return "agent";
        case ActorKind::Role: return "role";
    }
    return "?";
}

const char* to_string(ElementKind kind) {
    switch (kind) {
        case ElementKind::Goal: return "goal";
        case ElementKind::Quality: return "quality";
        case ElementKind::Task: return "task";
        case ElementKind::Resource: return "resource";
    }
    return "?";
}

const char* to_string(ActorLinkKind kind) {
    switch (kind) {
        case ActorLinkKind::IsA: return "isa";
        case ActorLinkKind::ParticipatesIn: return "participates";
    }
    return "?";
}

const char* to_string(ContributionLevel level) {
    switch (level) {
        case ContributionLevel::Make: return "make";
        case ContributionLevel::Help: return "help";
        case ContributionLevel::Hurt: return "hurt";
        case ContributionLevel::Break: return "break";
    }
    return "?";
}

const char* to_string(ModelErrorCode code) {
    switch (code) {
        case ModelErrorCode::EmptyName: return "EmptyName";
        case ModelErrorCode::UnknownActor: return "UnknownActor";
        case ModelErrorCode::UnknownElement: return "UnknownElement";
        case ModelErrorCode::SelfLink: return "SelfLink";
        case ModelErrorCode::IsAKindMismatch: return "IsAKindMismatch";
        case ModelErrorCode::DuplicateActorLink: return "DuplicateActorLink";
        case ModelErrorCode::ParentAlreadyRefined: return "ParentAlreadyRefined";
        case ModelErrorCode::AndArityTooSmall: return "AndArityTooSmall";
        case ModelErrorCode::KindNotRefinable: return "KindNotRefinable";
        case ModelErrorCode::CrossActorLink: return "CrossActorLink";
        case ModelErrorCode::DuplicateChild: return "DuplicateChild";
        case ModelErrorCode::SelfChild: return "SelfChild";
        case ModelErrorCode::MatrixViolation: return "MatrixViolation";
        case ModelErrorCode::ContributionQualificationClash:
            return "ContributionQualificationClash";
        case ModelErrorCode::SelfContribution: return "SelfContribution";
        case ModelErrorCode::SelfDependency: return "SelfDependency";
        case ModelErrorCode::ElmtOwnerMismatch: return "ElmtOwnerMismatch";
    }
    return "?";
}

namespace {

template <class Entities, class IdT>
auto* find_by_id(Entities& entities, IdT id) {
    for (auto& e : entities)
        if (e.id == id) return &e;
    return static_cast<decltype(&entities.front())>(nullptr);
}

bool blank(const std::string& name) {
    return std::all_of(name.begin(), name.end(), [](unsigned char c) {
        return std::isspace(c) != 0;
    });
}

ModelError err(ModelErrorCode code, std::string message) {
    return ModelError{code, std::move(message)};
}

}  // namespace

const Actor* Model::find(ActorId id) const { return find_by_id(actors, id); }
const IntentionalElement* Model::find(ElementId id) const {
    return find_by_id(elements, id);
}
const Refinement* Model::find(RefinementId id) const {
    return find_by_id(refinements, id);
}
const ElementLink* Model::find(ElementLinkId id) const {
    return find_by_id(elementLinks, id);
}
const Dependency* Model::find(DependencyId id) const {
    return find_by_id(dependencies, id);
}
const ActorLink* Model::find(ActorLinkId id) const {
    return find_by_id(actorLinks, id);
}

Result<ActorId> add_actor(Model& model, std::string name, ActorKind kind) {
    if (blank(name))
        return err(ModelErrorCode::EmptyName, "actor name must not be empty");
    ActorId id{model.freshId()};
    model.actors.push_back({id, std::move(name), kind});
    return id;
}

Result<ElementId> add_element(Model& model, ActorId owner, std::string name,
                              ElementKind kind) {
    if (!model.find(owner))
        return err(ModelErrorCode::UnknownActor, "unknown actor id");
    if (blank(name))
        return err(ModelErrorCode::EmptyName, "element name must not be empty");
    ElementId id{model.freshId()};
    model.elements.push_back({id, std::move(name), kind, owner});
    return id;
}

Result<ActorLinkId> add_actor_link(Model& model, ActorId source, ActorId target,
                                   ActorLinkKind kind) {
    const Actor* src = model.find(source);
    const Actor* dst = model.find(target);
    if (!src || !dst)
        return err(ModelErrorCode::UnknownActor, "unknown actor id");
    if (source == target)
        return err(ModelErrorCode::SelfLink,
                   "actor link endpoints must differ: '" + src->name + "'");
    if (kind == ActorLinkKind::IsA) {
        bool roles = src->kind == ActorKind::Role && dst->kind == ActorKind::Role;
        bool generics = src->kind == ActorKind::GenericActor &&
                        dst->kind == ActorKind::GenericActor;
        if (!roles && !generics)
            return err(ModelErrorCode::IsAKindMismatch,
                       "is-a applies only between pairs of roles or pairs of "
                       "generic actors: '" +
                           src->name + "' -> '" + dst->name + "'");
    }
    for (const ActorLink& link : model.actorLinks) {
        bool samePair = (link.source == source && link.target == target) ||
                        (link.source == target && link.target == source);
        if (samePair)
            return err(ModelErrorCode::DuplicateActorLink,
                       "'" + src->name + "' and '" + dst->name +
                           "' are already linked by an actor link");
    }
    ActorLinkId id{model.freshId()};
    model.actorLinks.push_back({id, source, target, kind});
    return id;
}

namespace {

// Boundary owner, or nullopt for dependums.
std::optional<ActorId> boundary_of(const Model& model, ElementId id) {
    const IntentionalElement* element = model.find(id);
    if (!element) return std::nullopt;
    if (const ActorId* actor = std::get_if<ActorId>(&element->owner))
        return *actor;
    return std::nullopt;
}

bool refinable(ElementKind kind) {
    return kind == ElementKind::Goal || kind == ElementKind::Task;
}

}  // namespace

Result<RefinementId> add_refinement(Model& model, ElementId parent,
                                    const std::vector<ElementId>& children,
                                    RefinementOperator op) {
    const IntentionalElement* parentElmt = model.find(parent);
    if (!parentElmt)
        return err(ModelErrorCode::UnknownElement, "unknown parent element");
    if (!refinable(parentElmt->kind))
        return err(ModelErrorCode::KindNotRefinable,
                   "only goals and tasks can be refined: '" + parentElmt->name +
                       "' is a " + std::string(to_string(parentElmt->kind)));
    if (op == RefinementOperator::And && children.size() < 2)
        return err(ModelErrorCode::AndArityTooSmall,
                   "AND-refinement of '" + parentElmt->name +
                       "' needs at least two children");
    if (children.empty())
        return err(ModelErrorCode::AndArityTooSmall,
                   "refinement of '" + parentElmt->name +
                       "' needs at least one child");
    for (const Refinement& refinement : model.refinements)
        if (refinement.parent == parent)
            return err(ModelErrorCode::ParentAlreadyRefined,
                       "'" + parentElmt->name +
                           "' is already the parent of a refinement");

    std::optional<ActorId> home = boundary_of(model, parent);
    std::vector<ElementId> seen;
    for (ElementId child : children) {
        const IntentionalElement* childElmt = model.find(child);
        if (!childElmt)
            return err(ModelErrorCode::UnknownElement, "unknown child element");
        if (child == parent)
            return err(ModelErrorCode::SelfChild,
                       "'" + parentElmt->name + "' cannot refine itself");
        if (std::find(seen.begin(), seen.end(), child) != seen.end())
            return err(ModelErrorCode::DuplicateChild,
                       "duplicate child '" + childElmt->name + "'");
        seen.push_back(child);
        if (!refinable(childElmt->kind))
            return err(ModelErrorCode::KindNotRefinable,
                       "only goals and tasks can refine: '" + childElmt->name +
                           "' is a " + std::string(to_string(childElmt->kind)));
        if (!home || boundary_of(model, child) != home)
            return err(ModelErrorCode::CrossActorLink,
                       "refinement of '" + parentElmt->name +
                           "' crosses actor boundaries");
    }
    RefinementId id{model.freshId()};
    model.refinements.push_back({id, parent, children, op});
    return id;
}

namespace {

struct LinkEnds {
    ElementId source;
    ElementId target;
    LinkClass linkClass;
};

LinkEnds ends_of(const std::variant<Contribution, NeededBy, Qualification>& v) {
    if (const Contribution* c = std::get_if<Contribution>(&v))
        return {c->source, c->target, LinkClass::Contribution};
    if (const NeededBy* n = std::get_if<NeededBy>(&v))
        return {n->resource, n->task, LinkClass::NeededBy};
    const Qualification& q = std::get<Qualification>(v);
    return {q.quality, q.subject, LinkClass::Qualification};
}

bool same_pair(ElementId a1, ElementId b1, ElementId a2, ElementId b2) {
    return (a1 == a2 && b1 == b2) || (a1 == b2 && b1 == a2);
}

}  // namespace

Result<ElementLinkId> add_element_link(
    Model& model, std::variant<Contribution, NeededBy, Qualification> link) {
    LinkEnds ends = ends_of(link);
    const IntentionalElement* src = model.find(ends.source);
    const IntentionalElement* dst = model.find(ends.target);
    if (!src || !dst)
        return err(ModelErrorCode::UnknownElement, "unknown link endpoint");
    if (ends.source == ends.target) {
        if (ends.linkClass == LinkClass::Contribution)
            return err(ModelErrorCode::SelfContribution,
                       "'" + src->name + "' cannot contribute to itself");
        return err(ModelErrorCode::SelfLink,
                   "link endpoints must differ: '" + src->name + "'");
    }
    if (!check_link_matrix(src->kind, dst->kind, ends.linkClass))
        return err(ModelErrorCode::MatrixViolation,
                   std::string(to_string(src->kind)) + " -> " +
                       to_string(dst->kind) + " does not admit this link kind");
    std::optional<ActorId> home = boundary_of(model, ends.source);
    if (!home || boundary_of(model, ends.target) != home)
        return err(ModelErrorCode::CrossActorLink,
                   "'" + src->name + "' and '" + dst->name +
                       "' are not wanted by the same actor");
    if (ends.linkClass == LinkClass::Contribution ||
        ends.linkClass == LinkClass::Qualification) {
        for (const ElementLink& existing : model.elementLinks) {
            LinkEnds other = ends_of(existing.variant);
            bool clash = other.linkClass != ends.linkClass &&
                         other.linkClass != LinkClass::NeededBy &&
                         other.linkClass != LinkClass::Refinement &&
                         same_pair(ends.source, ends.target, other.source,
                                   other.target);
            if (clash)
                return err(ModelErrorCode::ContributionQualificationClash,
                           "'" + src->name + "' and '" + dst->name +
                               "' are already linked by the other of "
                               "contribution/qualification");
        }
    }
    ElementLinkId id{model.freshId()};
    model.elementLinks.push_back({id, std::move(link)});
    return id;
}

Result<DependencyId> add_dependency(Model& model, ActorId depender,
                                    std::optional<ElementId> dependerElmt,
                                    std::string dependumName,
                                    ElementKind dependumKind, ActorId dependee,
                                    std::optional<ElementId> dependeeElmt) {
    const Actor* from = model.find(depender);
    const Actor* to = model.find(dependee);
    if (!from || !to)
        return err(ModelErrorCode::UnknownActor, "unknown actor id");
    if (depender == dependee)
        return err(ModelErrorCode::SelfDependency,
                   "depender and dependee must be different actors: '" +
                       from->name + "'");
    if (blank(dependumName))
        return err(ModelErrorCode::EmptyName, "dependum name must not be empty");
    if (dependerElmt) {
        if (!model.find(*dependerElmt))
            return err(ModelErrorCode::UnknownElement, "unknown dependerElmt");
        if (boundary_of(model, *dependerElmt) != std::optional(depender))
            return err(ModelErrorCode::ElmtOwnerMismatch,
                       "dependerElmt is not inside '" + from->name +
                           "'s boundary");
    }
    if (dependeeElmt) {
        if (!model.find(*dependeeElmt))
            return err(ModelErrorCode::UnknownElement, "unknown dependeeElmt");
        if (boundary_of(model, *dependeeElmt) != std::optional(dependee))
            return err(ModelErrorCode::ElmtOwnerMismatch,
                       "dependeeElmt is not inside '" + to->name +
                           "'s boundary");
    }
    DependencyId depId{model.freshId()};
    ElementId dependum{model.freshId()};
    model.elements.push_back({dependum, std::move(dependumName), dependumKind,
                              DependumMarker{depId}});
    model.dependencies.push_back(
        {depId, depender, dependerElmt, dependum, dependee, dependeeElmt});
    return depId;
}

}  // namespace istar
