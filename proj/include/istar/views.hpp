#pragma once

#include <set>

#include "istar/model.hpp"
#include "istar/validator.hpp"

namespace istar {

struct ViewKind {
    enum class Tag { SR, SD, Hybrid, ActorView, FunctionalView };
    Tag tag = Tag::SR;
    std::set<ActorId> openActors;  // Hybrid only

    static ViewKind sr() { return {Tag::SR, {}}; }
    static ViewKind sd() { return {Tag::SD, {}}; }
    static ViewKind hybrid(std::set<ActorId> open) {
        return {Tag::Hybrid, std::move(open)};
    }
    static ViewKind actor_view() { return {Tag::ActorView, {}}; }
    static ViewKind functional() { return {Tag::FunctionalView, {}}; }
};

// A projected subset of a source model. Dependency anchoring is encoded in
// the dependency records themselves: an end with its elmt present is
// element-anchored, an end with the elmt cleared is anchored to the actor.
struct ViewModel {
    ViewKind kind;
    Model model;
};

enum class ProjectErrorCode { InvalidModel, UnknownOpenActor };

struct ProjectError {
    ProjectErrorCode code;
    std::string message;
    std::vector<Diagnostic> diagnostics;  // for InvalidModel
};

struct ProjectOutcome {
    std::optional<ViewModel> view;
    std::optional<ProjectError> error;

    bool ok() const { return view.has_value(); }
};

// Projects a validated model into one of the five views. The source model
// must validate with zero errors; a Hybrid kind may only open actors that
// exist.
ProjectOutcome project(const Model& model, const ViewKind& kind);

}  // namespace istar
