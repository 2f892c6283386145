import pdfplumber
