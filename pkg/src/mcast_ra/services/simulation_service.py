"""
区间步进仿真引擎

每个报告区间依次执行：
1. 成员变化（epoch 边界）与预定的成员操作
2. 干扰更新
3. 按控制器的发送计划对所有节点抽样 PDR（扣除上一区间反馈碰撞造成的 ΔPDR）
4. 反馈协议：node_tick -> ap_select -> estimates
5. 控制器决策
6. 记录 MetricsFrame
"""

from typing import Dict, Optional

import numpy as np
from numpy.typing import NDArray

from mcast_ra.channel.churn import apply_churn, initial_membership, is_epoch_boundary
from mcast_ra.channel.interference import ChannelEffects, InterferenceSchedule
from mcast_ra.channel.model import ChannelModel, packets_per_interval
from mcast_ra.channel.population import build_population, deactivate_worst
from mcast_ra.controllers import ControllerKind, build_controller
from mcast_ra.controllers.base import BaseController, ControlInputs
from mcast_ra.controllers.mudra import target_condition
from mcast_ra.core.thresholds import a_max, classify_many
from mcast_ra.data_format.metrics import MetricsFrame, Trace
from mcast_ra.data_format.scenario import Scenario, ScheduledAction, ScheduledEvent
from mcast_ra.feedback.collision import check_interval, delta_pdr
from mcast_ra.feedback.protocol import FeedbackProtocol, FeedbackRound
from mcast_ra.logging.logger import logger
from mcast_ra.services.oracle_service import oracle_sweep, oracle_target_rate
from mcast_ra.utils.rng import SeededRNG


class SimulationService:
    """
    单次仿真运行

    每次 run() 都从 scenario.seed 重新构造全部随机流与信道状态，
    因此同一 (scenario, controller) 在任意线程中运行结果逐字节一致。
    """

    def __init__(self, record_oracle_sweep: bool = False):
        self.record_oracle_sweep = record_oracle_sweep

    def build_channel(self, scenario: Scenario, rng: SeededRNG) -> ChannelModel:
        nodes = build_population(
            scenario.channel.population, scenario.nodes, rng.stream("population")
        )
        schedule = InterferenceSchedule.build(
            scenario.interference,
            scenario.nodes,
            scenario.duration_s,
            scenario.reporting_interval_s,
            rng,
        )
        channel = ChannelModel(
            nodes,
            scenario.channel.requirement,
            scenario.ladder,
            schedule=schedule,
            interval_s=scenario.reporting_interval_s,
        )
        if scenario.churn is not None:
            channel.set_active(
                initial_membership(scenario.nodes, scenario.churn, rng.stream("churn"))
            )
        return channel

    def run(
        self, scenario: Scenario, controller_kind: Optional[ControllerKind] = None
    ) -> Trace:
        """
        运行一个场景

        Args:
            scenario: 已校验的场景
            controller_kind: 覆盖场景中的控制器选择

        Raises:
            InfeasibleIntervalError: T <= d·K
        """
        check_interval(scenario.reporting_interval_s, scenario.collision, scenario.feedback.k)

        kind = controller_kind or scenario.controller.kind
        rng = SeededRNG(scenario.seed)
        channel = self.build_channel(scenario, rng)
        controller = build_controller(kind, scenario.controller, scenario.ladder, rng)
        protocol = FeedbackProtocol(
            scenario.feedback,
            scenario.thresholds,
            rng.stream("jitter"),
        )
        sampling = rng.stream("sampling")
        churn_rng = rng.stream("churn")

        trace = Trace(
            scenario=scenario.name,
            controller=controller.name,
            seed=scenario.seed,
            interval_s=scenario.reporting_interval_s,
            base_snr=channel.base_snr.copy(),
        )
        logger.info(
            f"Run start: scenario={scenario.name} controller={controller.name} "
            f"seed={scenario.seed} intervals={scenario.n_intervals} nodes={scenario.nodes}"
        )

        T = scenario.reporting_interval_s
        th = scenario.thresholds
        sim = scenario.simulation
        pending_events = sorted(scenario.events, key=lambda e: e.at_s)
        previous_messages = 0

        for i in range(scenario.n_intervals):
            t = i * T

            # 1) 成员变化
            if scenario.churn is not None and i > 0 and is_epoch_boundary(t, scenario.churn.epoch_s):
                channel.set_active(apply_churn(channel.active, t, scenario.churn, churn_rng))
            while pending_events and pending_events[0].at_s < t + T - 1e-9:
                self._apply_event(pending_events.pop(0), channel, protocol, t)
            controller.observe_membership(channel.active, channel.base_snr)
            active = channel.active
            n_active = int(active.sum())

            # 2) 干扰
            assert channel.schedule is not None
            channel.schedule.activate(i, active)
            effects = channel.schedule.effects_for(i)

            # 3) PDR 抽样
            penalty = 0.0
            if controller.uses_feedback:
                penalty = delta_pdr(T, scenario.collision, previous_messages)
            node_pdr, leader_outcomes = self._sample(
                controller, channel, t, effects, penalty, sampling, scenario
            )

            # 4) 反馈
            limit = a_max(n_active, th.population)
            feedback: Optional[FeedbackRound] = None
            if controller.uses_feedback:
                feedback = protocol.step(node_pdr, active, limit)
                previous_messages = feedback.reports + feedback.volunteers
            a_true, m_true = classify_many(node_pdr, th)
            oracle = oracle_target_rate(channel, th, t, effects)
            trace.oracle_satisfiable.append(oracle.satisfiable)
            if self.record_oracle_sweep:
                for row in oracle_sweep(channel, th, t, effects):
                    trace.oracle_rows.append({"interval": i, **row.__dict__})

            # 5) 控制器
            rate = controller.rate
            inputs = ControlInputs(
                interval=i,
                a_hat=feedback.a_hat if feedback else None,
                m_hat=feedback.m_hat if feedback else None,
                a_max=limit,
                epsilon=th.epsilon,
                leader_outcomes=leader_outcomes,
            )
            factor = controller.delivery_factor(inputs)
            action = controller.tick(inputs)
            if controller.rate != rate:
                logger.debug(
                    f"[{controller.name}] t={t:.1f}s {rate} -> {controller.rate} "
                    f"(oracle {oracle.rate})"
                )

            # 6) 记录
            offered = rate.bps * T * sim.efficiency
            mean_pdr = float(np.nanmean(node_pdr)) if n_active else 0.0
            delivered = offered * mean_pdr * factor if n_active else 0.0
            trace.frames.append(
                MetricsFrame(
                    interval=i,
                    time_s=t,
                    rate_mbps=rate.value,
                    action=action.value,
                    window=controller.window,
                    a_hat=inputs.a_hat,
                    m_hat=inputs.m_hat,
                    a_true=a_true,
                    m_true=m_true,
                    a_max=limit,
                    target_condition=(
                        target_condition(feedback.a_hat, feedback.m_hat, limit)
                        if feedback
                        else None
                    ),
                    oracle_rate_mbps=oracle.rate.value,
                    delivered_bits=delivered,
                    goodput_bits=delivered * (1.0 - sim.fec_overhead),
                    control_bits=float(feedback.control_bytes * 8) if feedback else 0.0,
                    n_active=n_active,
                    fb_count=len(feedback.fb_list) if feedback else 0,
                    volunteers=feedback.volunteers if feedback else 0,
                    reporting_threshold=feedback.threshold if feedback else None,
                    delta_pdr=penalty,
                    interference_on=effects.interference_on,
                    node_pdr=node_pdr,
                )
            )

        if controller.uses_feedback:
            trace.fb_stints = protocol.tenure_stints()
        logger.info(
            f"Run done: scenario={scenario.name} controller={controller.name} "
            f"seed={scenario.seed} final_rate={controller.rate}"
        )
        return trace

    def _sample(
        self,
        controller: BaseController,
        channel: ChannelModel,
        t: float,
        effects: ChannelEffects,
        penalty: float,
        rng: SeededRNG,
        scenario: Scenario,
    ) -> tuple[NDArray[np.float64], Dict[int, float]]:
        plan = controller.transmission_plan()
        sim = scenario.simulation
        total = packets_per_interval(
            controller.rate, scenario.reporting_interval_s, sim.efficiency, sim.packet_bytes
        )
        leader = getattr(controller, "leader", None)

        node_pdr = np.zeros(channel.size)
        outcomes: Dict[int, float] = {}
        for rate, share in plan:
            packets = max(1, int(round(total * share)))
            measured = channel.sample_vector(rate, t, packets, rng, effects, penalty)
            node_pdr = node_pdr + share * measured
            if leader is not None:
                outcomes[rate.index] = float(measured[leader])
        node_pdr[~channel.active] = np.nan
        return node_pdr, outcomes

    @staticmethod
    def _apply_event(
        event: ScheduledEvent, channel: ChannelModel, protocol: FeedbackProtocol, t: float
    ) -> None:
        if event.action is ScheduledAction.DEACTIVATE_WORST:
            mask = deactivate_worst(channel.effective_snr, channel.active, event.count)
        else:
            mask = channel.active.copy()
            fb_nodes = list(protocol.state.fb_list)[: event.count]
            mask[fb_nodes] = False
        removed = int(channel.active.sum() - mask.sum())
        channel.set_active(mask)
        logger.info(f"t={t:.1f}s {event.action.value}: {removed} nodes turned off")
