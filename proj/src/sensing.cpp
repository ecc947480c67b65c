#include "uavsim/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "uavsim/errors.hpp"

namespace uavsim {

const char* to_string(TaskState s) {
    switch (s) {
        case TaskState::Pending: return "pending";
        case TaskState::Active: return "active";
        case TaskState::Sensed: return "sensed";
        case TaskState::Delivered: return "delivered";
    }
    return "?";
}

double success_probability(const SensingModel& model, const Point3& uav, const SensingTask& task) {
    return std::exp(-model.decay_per_m * distance(uav, task.center));
}

SphericalCrown feasible_region(const SensingModel& model, const SensingTask& task) {
    if (!(task.failure_tolerance > 0.0 && task.failure_tolerance < 1.0))
        throw DomainError("feasible_region: failure_tolerance must be in (0,1)");
    // 1 - exp(-kappa*d) <= tol  <=>  d <= -ln(1 - tol)/kappa
    double radius = -std::log(1.0 - task.failure_tolerance) / model.decay_per_m;
    radius = std::min(radius, model.max_crown_radius_m);
    SphericalCrown crown{task.center, radius, model.min_altitude_m};
    if (crown.empty()) {
        std::ostringstream msg;
        msg << "feasible_region: task " << task.id << " infeasible, crown radius " << radius
            << " m around z=" << task.center.z << " never reaches the minimum altitude "
            << model.min_altitude_m << " m";
        throw DomainError(msg.str());
    }
    return crown;
}

void record_sensing(SensingTask& task, const Point3& uav, const SensingModel& model, RngStream& rng) {
    if (task.state != TaskState::Active)
        throw DomainError("record_sensing: task is not active");
    if (!feasible_region(model, task).contains(uav))
        throw DomainError("record_sensing: UAV outside the feasible sensing region");
    if (!bernoulli(rng, success_probability(model, uav, task)))
        return;
    task.sensed_slots = std::min(task.sensed_slots + 1, task.sense_slots_required);
    task.collected_bits =
        task.data_volume_bits * static_cast<double>(task.sensed_slots) / task.sense_slots_required;
    if (task.sensed_slots == task.sense_slots_required)
        task.state = TaskState::Sensed;
}

} // namespace uavsim
