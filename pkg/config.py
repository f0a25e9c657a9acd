from typing import Literal, Optional

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    log_level: str = "INFO"
    log_dir: str = "logs"
    default_seed: int = 42
    tariff_override_path: Optional[str] = None  # applied on top of the bundled tariffs

    # Message is 160 bytes per exchange; treated as a tiny sustained rate.
    message_rate_mbps: float = 0.002
    message_needs_link: bool = True  # strict: no Message on a 0-Mbps link

    delay_metric: Literal["rtt", "one_way"] = "rtt"

    # Best-effort degradation model (loss% and jitter as a function of peak
    # path utilization).
    loss_knee: float = 0.7
    loss_span: float = 0.3
    loss_peak_pct: float = 2.0
    jitter_base_ms: float = 5.0
    jitter_gain_ms: float = 50.0

    # Share of the charge refunded when a session violates its SLA; the
    # default refunds everything, so violated sessions bill $0.
    sla_rebate: float = 1.0

    # QoS tier thresholds for best-effort connections.
    medium_max_loss_pct: float = 1.0
    very_high_max_jitter_ms: float = 5.0

    class Config:
        env_file = ".env"
        extra = "ignore"

    @property
    def degradation(self):
        from schemas import DegradationModel
        return DegradationModel(
            loss_knee=self.loss_knee,
            loss_span=self.loss_span,
            loss_peak_pct=self.loss_peak_pct,
            jitter_base_ms=self.jitter_base_ms,
            jitter_gain_ms=self.jitter_gain_ms,
        )

    @property
    def tier_thresholds(self):
        from schemas import TierThresholds
        return TierThresholds(
            medium_max_loss_pct=self.medium_max_loss_pct,
            very_high_max_jitter_ms=self.very_high_max_jitter_ms,
        )


settings = Settings()
