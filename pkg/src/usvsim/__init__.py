"""Station-keeping control and 3-DOF simulation for a twin-hull USV with two
azimuthing thrusters: vehicle dynamics, wind/current disturbance models, three
feedback controllers with wind feedforward, constrained thrust allocation and
a deterministic experiment harness.
"""

__version__ = "0.1.0"

from .dynamics import (HydroCoefficients, ThrusterSetpoint, VehicleParams,
                       VehicleState, Wrench, coriolis_matrix, drag_wrench,
                       estimate_hydro_coefficients, mass_matrix,
                       propulsion_wrench, rotation_matrix, state_derivative,
                       thrust_from_command)
from .wind import (CurrentParams, TrueWind, WindParams, WindSample, WindSeries,
                   anemometer_filter, apparent_from_true, current_wrench,
                   synthesize_wind, true_from_apparent, turbulence_stats,
                   wind_wrench)
from .control import (BackstepGains, PDGains, Setpoint, SlidingGains,
                      apply_feedforward, backstepping_control, pd_control,
                      select_lambda, sliding_mode_control, tracking_error)
from .allocation import (AllocationResult, AllocatorConfig, ExtendedThrust,
                         allocate, apply_angle_logic, build_transformation,
                         lowpass, weighted_pseudoinverse)
from .simulator import (Scenario, SensorModels, SimConfig, SimLog,
                        run_station_keeping, run_sysid_maneuver, sample_sensors,
                        step)
from .stats import (ErrorStats, WindStats, compute_error_stats,
                    compute_wind_stats)
from .matrix import MatrixReport, run_experiment_matrix
