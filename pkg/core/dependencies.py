"""
Dependency injection container for services.
Provides singleton access to the pipeline service and report repository.
"""

from typing import Optional

from repositories.reports import ReportRepository
from services.pipeline import PipelineService


class ServiceContainer:
    """Singleton container for application services."""

    _instance: Optional["ServiceContainer"] = None
    _pipeline_service: Optional[PipelineService] = None
    _repository: Optional[ReportRepository] = None

    def __new__(cls) -> "ServiceContainer":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def initialize(self) -> None:
        """Initialize all services."""
        if self._pipeline_service is None:
            self._repository = ReportRepository()
            self._pipeline_service = PipelineService(self._repository)

    def get_pipeline_service(self) -> PipelineService:
        if self._pipeline_service is None:
            self.initialize()
        return self._pipeline_service

    def get_repository(self) -> ReportRepository:
        if self._repository is None:
            self.initialize()
        return self._repository


_container = ServiceContainer()


def get_pipeline_service() -> PipelineService:
    """Get the global pipeline service instance."""
    return _container.get_pipeline_service()


def get_repository() -> ReportRepository:
    """Get the global report repository instance."""
    return _container.get_repository()
