"""Exception hierarchy shared by every stage of the pipeline."""


class CmsBridgeError(Exception):
    """Base class for all errors raised by cmsbridge."""


# -- metamodel ---------------------------------------------------------------

class ModelError(CmsBridgeError):
    pass


class DuplicateClassName(ModelError):
    pass


class NonExtendableKind(ModelError):
    pass


class UnknownClass(ModelError):
    pass


class ValidationFailed(ModelError):
    """Raised when a model or document breaks an invariant.

    ``path`` points at the offending element, e.g.
    ``extensions[2].relationships[0].target``.
    """

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class SchemaVersionMismatch(ModelError):
    pass


# -- transport (shared by discovery and drivers) -----------------------------

class TransportError(CmsBridgeError):
    pass


class Unreachable(TransportError):
    pass


class AuthFailed(TransportError):
    pass


# -- discovery ---------------------------------------------------------------

class DiscoveryError(CmsBridgeError):
    pass


class MalformedDiscoveryDocument(DiscoveryError):
    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class UnexpectedStatus(DiscoveryError):
    def __init__(self, status, url):
        self.status = status
        self.url = url
        super().__init__(f"HTTP {status} from {url}")


class UnclassifiableEntity(DiscoveryError):
    pass


class MalformedRelationshipEntry(DiscoveryError):
    pass


# -- drivers -----------------------------------------------------------------
class DriverError(CmsBridgeError):
    pass


class NotFound(DriverError):
    pass


class MalformedPayload(DriverError):
    pass


class ValidationRejected(DriverError):
    """The server refused a request with a 4xx status; ``body`` is kept verbatim."""

    def __init__(self, status, body):
        self.status = status
        self.body = body
        super().__init__(f"HTTP {status}: {body[:200]}")


class NoEndpoint(DriverError):
    pass


class NoSuchRelationship(DriverError):
    pass


class QueryError(DriverError):
    pass


class DuplicateSortField(QueryError):
    pass


class InvalidPage(QueryError):
    pass


class InvalidFilter(QueryError):
    pass


class UnsupportedFilter(QueryError):
    pass


class UnsupportedSort(QueryError):
    pass


# -- codegen -----------------------------------------------------------------

class CodegenError(CmsBridgeError):
    pass


class InvalidModel(CodegenError):
    pass


class IdentifierCollision(CodegenError):
    pass


class MissingScenarioClasses(CodegenError):
    pass


# -- mock --------------------------------------------------------------------

class MockError(CmsBridgeError):
    pass


class InvalidDefinition(MockError):
    pass


class UnknownType(MockError):
    pass


class PortInUse(MockError):
    pass
