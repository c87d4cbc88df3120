// Optional native runtime, resolved dynamically at run time when installed.
declare module 'onnxruntime-node';
