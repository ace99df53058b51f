"""rovsim: deterministic HIL stack for a 3-DOF micro ROV.

Plant simulator, emulated sensor kit, onboard estimation and PI control,
framed tether telemetry with a WebSocket JSON bridge, and a scenario
harness with CSV logging and step-response metrics.
"""

from .angles import angle_diff, wrap_angle
from .control import (
    DEPTH_GAINS,
    YAW_GAINS,
    ControlSetpoints,
    Mode,
    PIGains,
    PIState,
    control_step,
    pi_step,
)
from .dynamics import (
    SimulationDivergedError,
    ThrusterDuties,
    VehicleParams,
    VehicleState,
    duty_to_thrust,
    net_forces,
    step,
)
from .estimation import DepthAverager, FilterState, filter_update
from .harness import (
    RunLog,
    StepMetrics,
    compute_step_metrics,
    csv_text,
    replay_ground_truth,
    run_scenario,
    write_csv,
)
from .link import LinkConfig, TetherLink
from .scenario import BUILTIN_SCENARIOS, Scenario, get_scenario, load_scenario
from .sensors import (
    ConstantField,
    LinearDepthField,
    NoiseConfig,
    SensorFrame,
    SensorSuite,
    depth_from_pressure,
    ntu_to_voltage,
    voltage_to_ntu,
)
from .session import CONTROL_DT, SUBSTEP_DT, SUBSTEPS, SimSession

__version__ = "0.1.0"
