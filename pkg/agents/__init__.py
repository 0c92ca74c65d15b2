from .base_agent import BaseAgent
from .master_agent import MasterAgent
from .simulation_agent import SimulationAgent
from .distribution_agent import DistributionAgent
from .verification_agent import VerificationAgent

__all__ = ['BaseAgent', 'MasterAgent', 'SimulationAgent', 'DistributionAgent', 'VerificationAgent']
