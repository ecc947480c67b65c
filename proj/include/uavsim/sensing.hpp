#ifndef UAVSIM_SENSING_HPP
#define UAVSIM_SENSING_HPP

#include <cstdint>
#include <string>

#include "uavsim/geometry.hpp"
#include "uavsim/rng.hpp"

namespace uavsim {

enum class TaskState { Pending, Active, Sensed, Delivered };

const char* to_string(TaskState s);

struct SensingTask {
    int id = -1;
    Point3 center;
    double failure_tolerance = 0.5;   // in (0,1)
    double data_volume_bits = 0.0;
    double collected_bits = 0.0;      // gathered so far, available for upload
    double delivered_bits = 0.0;      // uploaded to the BS
    int sense_slots_required = 1;
    int sensed_slots = 0;
    TaskState state = TaskState::Pending;

    double backlog_bits() const { return collected_bits - delivered_bits; }
};

struct SensingModel {
    double decay_per_m = 0.01;        // kappa in p(d) = exp(-kappa*d)
    double min_altitude_m = 50.0;
    double max_crown_radius_m = 5000.0;  // cap as failure_tolerance -> 1
};

// p(success in one slot) = exp(-kappa * distance to the task center).
double success_probability(const SensingModel& model, const Point3& uav, const SensingTask& task);

// Largest region where 1 - p(success) <= failure_tolerance, intersected
// with the minimum-altitude halfspace: a spherical crown of radius
// -ln(1 - tolerance)/kappa (capped) around the task center. Throws
// DomainError when the altitude constraint excludes the whole sphere.
SphericalCrown feasible_region(const SensingModel& model, const SensingTask& task);

// One sensing slot: with probability success_probability the slot
// counts; each counted slot releases data_volume/sense_slots_required
// bits for upload, and the final one moves the task to Sensed.
// Requires task.state == Active and the UAV inside the feasible region.
void record_sensing(SensingTask& task, const Point3& uav, const SensingModel& model, RngStream& rng);

} // namespace uavsim

#endif
