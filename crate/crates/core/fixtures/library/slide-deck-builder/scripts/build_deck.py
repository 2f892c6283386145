import pptx
