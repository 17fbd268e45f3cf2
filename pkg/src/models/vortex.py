import math

from pydantic import BaseModel, ConfigDict, Field


class VortexPairConfig(BaseModel):
    """Corotating vortex pair; the rotation rate and periods are derived, never stored."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    gamma: float = Field(default=0.98696, ge=0, description="circulation of each vortex [m^2/s]")
    r0: float = Field(default=1.0, gt=0, description="distance of each vortex from the centre [m]")
    rc: float = Field(default=0.2, gt=0, description="Scully core radius [m]")
    rho0: float = Field(default=1.0, gt=0, description="reference density [kg/m^3]")
    c0: float = Field(default=1.0, gt=0, description="speed of sound [m/s]")

    @property
    def omega(self) -> float:
        return self.gamma / (4.0 * math.pi * self.r0**2)

    @property
    def mach(self) -> float:
        return self.gamma / (4.0 * math.pi * self.r0 * self.c0)

    @property
    def fluid_period(self) -> float:
        if self.gamma == 0.0:
            return math.inf
        return 8.0 * math.pi**2 * self.r0**2 / self.gamma

    @property
    def acoustic_period(self) -> float:
        return 0.5 * self.fluid_period

    @property
    def wavenumber(self) -> float:
        return 2.0 * self.omega / self.c0
