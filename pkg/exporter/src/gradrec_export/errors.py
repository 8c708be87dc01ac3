class ExportError(Exception):
    code = "ExportError"


class InvalidManifest(ExportError):
    code = "InvalidManifest"


class ModelLoadFailure(ExportError):
    code = "ModelLoadFailure"


class ImageDecodeFailure(ExportError):
    code = "ImageDecodeFailure"
