import logging
from functools import partial

import numpy as np

from .base import Frame
from .curve import reconstruct_curve
from .frames import STEP_ANGLE, integrate_time_frames, space_frames_field

logger = logging.getLogger(__name__)


def _space_fanout(field, x, x0_index, step_angle, job):
    t, frame = job
    frames, _ = space_frames_field(field, t, x, Frame(frame), x0_index, step_angle=step_angle)
    return frames


class FilamentEvolution:
    """
    Binormal-flow curve driven by a filament field.

    The frame and the position are carried in time at the anchor point x0
    (time equation plus chi_t = Im(conj(u) N)); at every saved time the space
    equation fans the frame out along the grid and the tangent is integrated
    from the anchor. A second time route at a probe point checks the result.
    """

    ROUTE_TOL = 1e-6

    def __init__(self, field, x, x0_index=None, frame0=None, chi0=(0.0, 0.0, 0.0), log_time=False,
                 step_angle=STEP_ANGLE, probe_index=None, route_tol=None, map_fn=map):
        """
        Args:
            field (FilamentField): Driving solution
            x (array-like): Uniform arclength grid
            x0_index (int, optional): Anchor node, defaults to the node nearest 0
            frame0 (Frame, optional): Frame at the anchor at the first saved time
            chi0 (array-like): Position of the anchor at the first saved time
            log_time (bool): Integrate the time equation in tau = log t
            step_angle (float): Largest rotation per Magnus substep
            probe_index (int, optional): Node of the route check, defaults to a quarter span right of x0
            route_tol (float, optional): Flag threshold of the route check
            map_fn (callable): map-like used for the space fan-out (a worker pool's map)
        """
        self.field = field
        self.x = np.asarray(x, dtype=float)
        self.x0_index = int(np.argmin(np.abs(self.x))) if x0_index is None else int(x0_index)
        self.frame0 = frame0 or Frame.identity()
        self.chi0 = np.asarray(chi0, dtype=float)
        self.log_time = log_time
        self.step_angle = step_angle
        if probe_index is None:
            probe_index = min(self.x.size - 1, self.x0_index + max(1, (self.x.size - 1) // 4))
        self.probe_index = probe_index
        self.route_tol = route_tol or self.ROUTE_TOL
        self.map_fn = map_fn

    @property
    def x0(self):
        return float(self.x[self.x0_index])

    def time_route(self, times):
        return integrate_time_frames(
            self.field, self.x0, times, self.frame0, chi0=self.chi0,
            log_time=self.log_time, step_angle=self.step_angle,
        )

    def run(self, times, check_route=True):
        """
        Evolve and reconstruct the curve at the saved times.

        Args:
            times (array-like): Monotone saved times; frame0 and chi0 belong to times[0]
            check_route (bool): Run the probe-point route comparison

        Returns:
            CurveTrajectory
        """
        times = np.asarray(times, dtype=float)
        logger.info(f"🚀 Filament evolution: {times.size} times, {self.x.size} grid points")
        route = self.time_route(times)

        fanout = partial(_space_fanout, self.field, self.x, self.x0_index, self.step_angle)
        frames = np.stack(list(self.map_fn(fanout, zip(times, route.frames))))
        trajectory = reconstruct_curve(frames, self.x, route.chi, times, self.x0_index)
        trajectory.orthonormality = max(trajectory.orthonormality, route.orthonormality)

        if check_route and self.probe_index != self.x0_index:
            trajectory.route_deviation = self.route_deviation(trajectory)
            if trajectory.route_deviation > self.route_tol:
                trajectory.flags["route_disagreement"] = True
                logger.warning(
                    f"⚠️ Space and time routes differ by {trajectory.route_deviation:.3e} at x={self.x[self.probe_index]:.4g}"
                )
        logger.info(f"✅ Filament evolution done, orthonormality defect {trajectory.orthonormality:.2e}")
        return trajectory

    def route_deviation(self, trajectory):
        """Largest |chi_space - chi_time| at the probe node over the saved times."""
        first = trajectory[0]
        probe = integrate_time_frames(
            self.field, float(self.x[self.probe_index]), trajectory.times,
            Frame(first.frames[self.probe_index]), chi0=first.chi[self.probe_index],
            log_time=self.log_time, step_angle=self.step_angle,
        )
        space_route = trajectory.chi[:, self.probe_index, :]
        return float(np.max(np.linalg.norm(space_route - probe.chi, axis=1)))
